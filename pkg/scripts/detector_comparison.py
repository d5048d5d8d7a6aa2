"""Swap heralds and operation rates with threshold vs photon-number-resolving swap detectors."""

from channel_correction.config import DEFAULT_ETAS, preset
from channel_correction.protocols import corrected_channel
from channel_correction.rates import operation_rates


def main():
    base = preset("ideal")
    print(f"{'L':>7} {'eta':>7} {'sent pnr/thr':>13} {'op/direct thr':>14} {'op/direct pnr':>14} {'C thr':>7} {'C pnr':>7}")
    for loss in (0.0, 0.9884):
        for eta in DEFAULT_ETAS + (0.5,):
            cfg = base.with_(loss=loss, eta=eta)
            thr, pnr = corrected_channel(cfg), corrected_channel(cfg.with_(swap_detector="pnr"))
            rt, rp = operation_rates(cfg, result=thr), operation_rates(cfg, result=pnr)
            print(
                f"{loss:7.4f} {eta:7.4f} {pnr.p_state_sent / thr.p_state_sent:13.4f} "
                f"{rt.operation_rate_ratio:14.4f} {rp.operation_rate_ratio:14.4f} {thr.concurrence:7.4f} {pnr.concurrence:7.4f}"
            )


if __name__ == "__main__":
    main()
