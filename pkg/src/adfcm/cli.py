from __future__ import annotations

import argparse
import logging
from typing import List, Optional

from adfcm.errors import AdfcmError, DataError
from adfcm.pipeline.orchestrator import COMMANDS
from adfcm.utils.config import RunConfig, load_json
from adfcm.utils.logging import setup_logging

_D = RunConfig()


def _common_parser() -> argparse.ArgumentParser:
    # Every default is None so an explicit flag can be told apart from a
    # value coming from --config or from RunConfig.
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="JSON file with default values for any option")
    p.add_argument("--log", default="INFO", help="Log level: DEBUG/INFO/WARNING")
    p.add_argument("--output", help="Output path")
    p.add_argument("--seed", type=int, help=f"Seed for centroid initialization (default {_D.seed})")
    p.add_argument("--format", choices=["csv", "json"], help=f"Report format (default {_D.format})")
    return p


def _fcm_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--fuzzifier", type=float, help=f"Fuzzifier m > 1 (default {_D.fuzzifier})")
    p.add_argument("--max-iter", dest="max_iter", type=int, help=f"Iteration cap (default {_D.max_iter})")
    p.add_argument("--tol", type=float, help=f"Relative objective tolerance (default {_D.tol})")
    return p


def _table_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--input", help="Input CSV path")
    p.add_argument("--label-column", dest="label_column", help="Name (or 0-based index) of the label column")
    p.add_argument("--delimiter", help=f"CSV delimiter (default {_D.delimiter!r})")
    p.add_argument("--no-header", dest="no_header", action="store_true", default=None,
                   help="Input CSV has no header row")
    p.add_argument("--no-normalize", dest="normalize", action="store_false", default=None,
                   help="Skip min-max normalization of features")
    p.add_argument("--bins", type=int, help=f"Equal-frequency bins for feature scoring (default {_D.bins})")
    return p


def _threshold_args(p: argparse.ArgumentParser, list_help: str) -> None:
    p.add_argument("--threshold", type=float, help=f"Certainty threshold in [0, 1] (default {_D.threshold})")
    p.add_argument("--thresholds", type=float, nargs="+", help=list_help)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="adfcm", description="Fuzzy C-Means with ambiguity detection")
    sub = p.add_subparsers(dest="cmd", required=True)

    common, fcm, table = _common_parser(), _fcm_parser(), _table_parser()

    # cluster
    p_cluster = sub.add_parser("cluster", parents=[common, fcm, table],
                               help="Cluster a CSV and mark ambiguous records")
    p_cluster.add_argument("--clusters", type=int, help=f"Number of clusters (default {_D.clusters})")
    p_cluster.add_argument("--threshold", type=float, help=f"Certainty threshold in [0, 1] (default {_D.threshold})")
    p_cluster.add_argument("--select-top", dest="select_top", type=int,
                           help="Cluster on the k features with the highest symmetric uncertainty")
    p_cluster.add_argument("--export-ambiguous", dest="export_ambiguous",
                           help="Write the ambiguous records to this CSV")

    # sweep
    p_sweep = sub.add_parser("sweep", parents=[common, fcm, table],
                             help="Evaluate a range of certainty thresholds against labels")
    p_sweep.add_argument("--clusters", type=int, help=f"Number of clusters (default {_D.clusters})")
    _threshold_args(p_sweep, "Ascending thresholds (default 0 to 0.45 step 0.05)")
    p_sweep.add_argument("--select-top", dest="select_top", type=int,
                         help="Cluster on the k features with the highest symmetric uncertainty")
    p_sweep.add_argument("--minority-label", dest="minority_label", help="Class to undersample")
    p_sweep.add_argument("--minority-fraction", dest="minority_fraction", type=float,
                         help="Target share of the minority class in (0, 1)")

    # segment
    p_segment = sub.add_parser("segment", parents=[common, fcm],
                               help="Segment a PGM image; ambiguous pixels are painted black")
    p_segment.add_argument("--input", help="Input PGM (P2 or P5)")
    p_segment.add_argument("--clusters", type=int, help=f"Number of clusters (default {_D.clusters})")
    _threshold_args(p_segment, "Write one image per threshold (suffix _t<threshold>)")

    # select-features
    p_select = sub.add_parser("select-features", parents=[common, table],
                              help="Rank features by symmetric uncertainty with the class")
    p_select.add_argument("--top", dest="select_top", type=int, help="Mark the top k features as selected")

    # privacy
    p_privacy = sub.add_parser("privacy", parents=[common, fcm, table],
                               help="Center error of FCM vs AD-FCM after adding noisy records")
    p_privacy.add_argument("--clusters", type=int, help=f"Number of clusters (default {_D.clusters})")
    _threshold_args(p_privacy, "AD-FCM thresholds (default 0.4 0.5 0.6)")
    p_privacy.add_argument("--noise", type=float, help=f"Noise records as a fraction of N (default {_D.noise})")
    p_privacy.add_argument("--repeats", type=int, help=f"Seeded runs per threshold (default {_D.repeats})")
    p_privacy.add_argument("--per-cluster", dest="per_cluster", type=int,
                           help=f"Blob size when no --input is given (default {_D.per_cluster})")
    p_privacy.add_argument("--spread", type=float, help=f"Blob standard deviation (default {_D.spread})")
    p_privacy.add_argument("--n-features", dest="n_features", type=int,
                           help=f"Blob dimensionality (default {_D.n_features})")

    # grid
    p_grid = sub.add_parser("grid", parents=[common, fcm, table],
                            help="False detection rate over cluster counts and fuzzifiers")
    p_grid.add_argument("--clusters", dest="grid_clusters", type=int, nargs="+",
                        help=f"Cluster counts (default {' '.join(map(str, _D.grid_clusters))})")
    p_grid.add_argument("--fuzzifiers", dest="grid_fuzzifiers", type=float, nargs="+",
                        help=f"Fuzzifiers (default {' '.join(map(str, _D.grid_fuzzifiers))})")
    p_grid.add_argument("--threshold", type=float, help=f"Certainty threshold in [0, 1] (default {_D.threshold})")

    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log)
    log = logging.getLogger("adfcm_cli")

    try:
        file_values = load_json(args.config) if args.config else None
        cli_values = {k: v for k, v in vars(args).items() if k not in {"cmd", "config", "log"}}
        cfg = RunConfig.from_sources(cli_values, file_values).validate()
        COMMANDS[args.cmd](cfg)
    except AdfcmError as e:
        log.error("%s: %s", type(e).__name__, e)
        return e.exit_code
    except FileNotFoundError as e:
        log.error("File not found: %s", e)
        return DataError.exit_code
    except OSError as e:
        log.error("I/O error: %s", e)
        return DataError.exit_code

    log.info("Done: %s", args.cmd)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
