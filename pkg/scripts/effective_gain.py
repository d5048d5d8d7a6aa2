"""Transmission-equivalent gain of the corrected channel at each sweep point."""

from channel_correction.config import DEFAULT_ETAS, DEFAULT_LOSSES, preset
from channel_correction.protocols import corrected_channel
from channel_correction.rates import effective_transmission_gain


def main():
    for name in ("ideal", "measured"):
        cfg = preset(name)
        print(f"[{name}]")
        for loss in DEFAULT_LOSSES:
            cells = []
            for eta in DEFAULT_ETAS:
                c = corrected_channel(cfg.with_(loss=loss, eta=eta)).concurrence
                cells.append(f"{effective_transmission_gain(c, loss, cfg).db:6.2f}")
            print(f"L={loss:<7} " + " ".join(cells))


if __name__ == "__main__":
    main()
