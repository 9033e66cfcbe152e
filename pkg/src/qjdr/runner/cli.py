"""Command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical
failure, 3 I/O error.
"""

import argparse
import csv
import logging
import math
import sys

from .. import __version__
from ..codebook import load_codebook
from ..exceptions import CodebookParseError, ConfigError, NumericalError
from ..transduction import CoherentPulse, bloch_vector, nbar_from_temperature, transduce_pulse
from ..discrimination import classical_codeword_baseline, helstrom_bpsk_optical
from ..vqc import AnsatzSpec, train
from .config import apply_overrides, format_config, load_config
from .output import emit_csv, emit_plot, format_csv, read_csv
from .sweep import SweepFailed, evaluate_bounds, run_sweep

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("qjdr")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common(p):
    p.add_argument("--config", metavar="PATH", help="INI configuration file")
    p.add_argument("--out", metavar="PATH", help="output file (default: stdout, or the config's output for sweep)")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE",
                   help="override a configuration value (repeatable)")
    p.add_argument("--seed", type=int, help="training seed (overrides train.seed)")
    p.add_argument("--jobs", type=int, default=0, help="worker processes for grid points (0 = auto)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = _Parser(prog="qjdr", description="Transduction-based joint detection receiver workbench")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("baseline", help="classical single-pulse Helstrom curve")
    _common(p)

    p = sub.add_parser("transduce", help="single-pulse Bloch-vector diagnostics")
    _common(p)
    p.add_argument("--phase", type=float, default=0.0, help="pulse phase in radians")

    p = sub.add_parser("optimal", help="optimal-POVM and PGM bounds without training")
    _common(p)

    p = sub.add_parser("train", help="train the variational receiver at one grid point")
    _common(p)
    p.add_argument("--magnitude", type=float, help="pulse magnitude (default: first grid value)")
    p.add_argument("--temperature", type=float, help="temperature in kelvin (default: first grid value)")

    p = sub.add_parser("sweep", help="full experiment: bounds and trained receiver on the grid")
    _common(p)
    p.add_argument("--plot", metavar="SVG", help="also render the sweep to this SVG file")

    p = sub.add_parser("plot", help="render a sweep CSV as SVG")
    p.add_argument("csv", help="sweep CSV produced by 'sweep'")
    p.add_argument("--out", required=True, metavar="SVG")
    p.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("config", help="print the effective configuration")
    _common(p)
    return parser


def _load(args):
    config = load_config(args.config)
    overrides = list(args.overrides)
    if args.seed is not None:
        overrides.append(f"train.seed={args.seed}")
    return apply_overrides(config, overrides)


def _g(x):
    return format(float(x), ".12g")


def _write_table(header, rows, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def cmd_baseline(args, config):
    rows = [
        [_g(m), _g(m * m), _g(helstrom_bpsk_optical(m)), _g(classical_codeword_baseline(m, config.info_pulses))]
        for m in sorted(config.magnitudes)
    ]
    _write_table(["magnitude", "alpha_sq", "p_err_single", "p_err_classical"], rows, args.out)
    return EXIT_OK


def cmd_transduce(args, config):
    rows = []
    for t in sorted(config.temperatures_kelvin):
        nbar = nbar_from_temperature(t, config.frequency_hz)
        params = config.transduction_params(nbar)
        for m in sorted(config.magnitudes):
            rho = transduce_pulse(CoherentPulse(m, args.phase), params)
            x, y, z = bloch_vector(rho)
            purity = float((rho @ rho).trace().real)
            rows.append([_g(t), _g(nbar), _g(m), _g(x), _g(y), _g(z),
                         _g(math.atan2(y, x) % (2 * math.pi)), _g(math.hypot(x, y)), _g(purity)])
    header = ["temperature_kelvin", "nbar", "magnitude", "x", "y", "z", "azimuth", "transverse", "purity"]
    _write_table(header, rows, args.out)
    return EXIT_OK


def cmd_optimal(args, config):
    codebook = load_codebook(config.codebook)
    rows = []
    for t in sorted(config.temperatures_kelvin):
        for m in sorted(config.magnitudes):
            b = evaluate_bounds(config, t, m, codebook)
            opt = b["optimal"]
            rows.append([_g(m), _g(m * m), _g(b["nbar"]), _g(b["classical"]), _g(opt.p_err),
                         _g(b["pgm"]), _g(opt.ykl_residual), opt.iterations])
    header = ["magnitude", "alpha_sq", "nbar", "p_err_classical", "p_err_optimal", "p_err_pgm",
              "ykl_residual", "povm_iterations"]
    _write_table(header, rows, args.out)
    return EXIT_OK


def cmd_train(args, config):
    codebook = load_codebook(config.codebook)
    m = args.magnitude if args.magnitude is not None else sorted(config.magnitudes)[0]
    t = args.temperature if args.temperature is not None else sorted(config.temperatures_kelvin)[0]
    b = evaluate_bounds(config, t, m, codebook)
    spec = AnsatzSpec(codebook.length, config.num_layers)
    result = train(spec, b["ensemble"], config.train)
    lines = [
        f"# magnitude={_g(m)} temperature_kelvin={_g(t)} nbar={_g(b['nbar'])} "
        f"layers={config.num_layers} optimizer={config.train.optimizer.value} seed={config.train.seed}",
        "step,best_p_err",
    ]
    lines += [f"{i},{_g(v)}" for i, v in result.trajectory]
    lines += [
        f"# p_err_vqc={_g(result.p_err)} p_err_optimal={_g(b['optimal'].p_err)} "
        f"p_err_classical={_g(b['classical'])} iterations={result.iterations}",
        "# restart p_err: " + " ".join(_g(v) for v in result.restart_p_errs),
        "# assignment: " + " ".join(str(int(a)) for a in result.assignment),
        "# params: " + " ".join(_g(v) for v in result.best_params),
    ]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_sweep(args, config):
    out = args.out or config.output

    def progress(t, m, result):
        row, failure = result
        if failure is not None:
            log.info("T=%g |alpha|=%g failed: %s", t, m, failure.error)
        else:
            log.info("T=%g |alpha|=%g p_opt=%.6g p_vqc=%.6g", t, m, row.p_err_optimal, row.p_err_vqc)

    status = EXIT_OK
    try:
        rows = run_sweep(config, jobs=args.jobs, progress=progress)
    except SweepFailed as exc:
        rows = exc.rows
        print(f"error: {exc}", file=sys.stderr)
        status = EXIT_NUMERICAL if exc.numerical else EXIT_USAGE
    if out == "-":
        sys.stdout.write(format_csv(rows))
    else:
        emit_csv(rows, out)
    if args.plot and rows:
        emit_plot(rows, args.plot)
    return status


def cmd_plot(args, config=None):
    emit_plot(read_csv(args.csv), args.out)
    return EXIT_OK


def cmd_config(args, config):
    text = format_config(config)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    "baseline": cmd_baseline,
    "transduce": cmd_transduce,
    "optimal": cmd_optimal,
    "train": cmd_train,
    "sweep": cmd_sweep,
    "plot": cmd_plot,
    "config": cmd_config,
}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = None if args.command == "plot" else _load(args)
        return COMMANDS[args.command](args, config)
    except (ConfigError, CodebookParseError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
