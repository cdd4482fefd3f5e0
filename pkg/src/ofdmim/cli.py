"""Command line entry point: ``ofdmim sweep | papr | se``.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from ._validation import ConfigError
from .analytics import SCHEMES, SchemeParams, papr_bound, papr_ccdf, spectral_efficiency
from .estimators import OfdmImModulator
from .frame import papr_of, to_time_domain
from .harness import LinkConfig, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3

logger = logging.getLogger("ofdmim")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _optional_int(text):
    return None if text.lower() == "none" else int(text)


def _add_link_flags(parser):
    for f in fields(LinkConfig):
        flag = "--" + f.name.replace("_", "-")
        if f.name == "snr_db":
            parser.add_argument(flag, type=float, nargs="+", default=None,
                                help="SNR points in dB (rho = U p_s / sigma^2)")
        elif f.name == "power_normalize":
            parser.add_argument(flag, action=argparse.BooleanOptionalAction, default=None)
        elif f.name in ("max_trials", "chunk_size"):
            parser.add_argument(flag, type=_optional_int, default=None)
        elif f.type in (int, "int"):
            parser.add_argument(flag, type=int, default=None)
        else:
            parser.add_argument(flag, default=None)


def load_config_file(path):
    """Read a YAML/JSON key-value file into a LinkConfig keyword mapping."""
    text = Path(path).read_text()
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must contain a key-value mapping")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def config_from_args(args):
    values = load_config_file(args.config) if args.config else {}
    for f in fields(LinkConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    if "snr_db" in values:
        values["snr_db"] = tuple(np.atleast_1d(values["snr_db"]).astype(float))
    return LinkConfig.from_mapping(values)


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_sweep(args):
    config = config_from_args(args)
    result = run_sweep(config, workers=args.workers)
    _emit(result.to_json() if args.format == "json" else result.to_csv(), args.out)


def _empirical_papr(n_tot, n_group, k_active, order, blocks, seed):
    mod = OfdmImModulator(n_tot, n_group, k_active, order).fit()
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=(blocks, mod.n_features_in_), dtype=np.uint8)
    payload = to_time_domain(mod.transform(bits), 0)
    return papr_of(payload)


def cmd_papr(args):
    params = SchemeParams(args.scheme, args.n_tot, args.n_cp, args.order,
                          args.n_group if args.scheme != "SIM-OFDM" else None,
                          args.k_active if args.scheme == "OFDM-IM" else None)
    bound = papr_bound(params)
    samples = _empirical_papr(params.n_tot, params.n_group, params.k_active, params.order,
                              args.blocks, args.seed)
    thresholds = np.asarray(args.thresholds if args.thresholds else np.arange(0.0, bound + 1.0, 0.5))
    ccdf = papr_ccdf(samples, thresholds)
    if args.format == "json":
        doc = {
            "metadata": {"version": __version__, "scheme": params.scheme, "n_tot": params.n_tot,
                         "n_group": params.n_group, "k_active": params.k_active,
                         "order": params.order, "blocks": args.blocks, "seed": args.seed,
                         "papr_bound_db": bound, "max_papr_db": float(samples.max())},
            "ccdf": [{"threshold_db": float(t), "ccdf": float(c)} for t, c in zip(thresholds, ccdf)],
        }
        text = json.dumps(doc, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["scheme", "threshold_db", "ccdf", "papr_bound_db", "seed"])
        for t, c in zip(thresholds, ccdf):
            w.writerow([params.scheme, repr(float(t)), repr(float(c)), repr(bound), args.seed])
        text = buf.getvalue()
    _emit(text, args.out)


def cmd_se(args):
    schemes = SCHEMES if args.scheme == "all" else (args.scheme,)
    rows = []
    for scheme in schemes:
        params = SchemeParams(scheme, args.n_tot, args.n_cp, args.order,
                              args.n_group if scheme == "OFDM-IM" else None,
                              args.k_active if scheme == "OFDM-IM" else None)
        se = spectral_efficiency(params)
        rows.append({"scheme": scheme, "se": f"{se.numerator}/{se.denominator}",
                     "se_decimal": round(float(se), args.precision),
                     "papr_bound_db": round(papr_bound(params), args.precision)})
    if args.format == "json":
        text = json.dumps({"version": __version__, "results": rows}, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        text = buf.getvalue()
    _emit(text, args.out)


def build_parser():
    parser = _Parser(prog="ofdmim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sweep = sub.add_parser("sweep", help="Monte Carlo BER sweep over SNR")
    sweep.add_argument("--config", help="YAML/JSON key-value file; flags override it")
    _add_link_flags(sweep)
    sweep.add_argument("--workers", type=int, default=1)
    sweep.add_argument("--out")
    sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    sweep.set_defaults(func=cmd_sweep)

    papr = sub.add_parser("papr", help="PAPR bound and empirical CCDF")
    papr.add_argument("--scheme", choices=SCHEMES, default="OFDM-IM")
    papr.add_argument("--n-tot", type=int, default=128)
    papr.add_argument("--n-cp", type=int, default=16)
    papr.add_argument("--n-group", type=int, default=8)
    papr.add_argument("--k-active", type=int, default=6)
    papr.add_argument("--order", type=int, default=4)
    papr.add_argument("--blocks", type=int, default=10_000)
    papr.add_argument("--thresholds", type=float, nargs="+")
    papr.add_argument("--seed", type=int, default=0)
    papr.add_argument("--out")
    papr.add_argument("--format", choices=("csv", "json"), default="csv")
    papr.set_defaults(func=cmd_papr)

    se = sub.add_parser("se", help="closed-form spectral efficiency")
    se.add_argument("--scheme", choices=SCHEMES + ("all",), default="all")
    se.add_argument("--n-tot", type=int, default=128)
    se.add_argument("--n-cp", type=int, default=16)
    se.add_argument("--n-group", type=int, default=8)
    se.add_argument("--k-active", type=int, default=6)
    se.add_argument("--order", type=int, default=4)
    se.add_argument("--precision", type=int, default=4)
    se.add_argument("--out")
    se.add_argument("--format", choices=("csv", "json"), default="csv")
    se.set_defaults(func=cmd_se)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ConfigError, OSError) as exc:
        print(f"ofdmim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        logger.debug("runtime failure", exc_info=True)
        print(f"ofdmim: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
