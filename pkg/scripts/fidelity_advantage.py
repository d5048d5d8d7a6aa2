"""Optimal amplifier gain and average-fidelity gain over plain loss as a function of transmission."""

import numpy as np

from channel_correction.analytics import average_fidelity, optimal_gain


def main():
    print(f"{'T':>5} {'g*':>8} {'F_av(g*)':>10} {'F_av(1)':>9}")
    for t in np.linspace(0.05, 0.95, 19):
        g, f = optimal_gain(float(t))
        print(f"{t:5.2f} {g:8.3f} {f:10.5f} {average_fidelity(float(t), 1.0):9.5f}")


if __name__ == "__main__":
    main()
