"""Command-line interface.

Every stochastic command requires a seed and embeds its run configuration in
the machine-readable output, so re-running an embedded configuration
reproduces the output byte for byte, for any worker count.  Wall-clock time
is only included when explicitly requested (``--timing``), since it would
break reproducibility of the report bytes.

Exit codes: 0 success, 1 usage error, 2 numerical or invariant failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import channels, estimators, ladder, protocols, reports
from .errors import (
    DomainError,
    EchoChanError,
    NumericalError,
    ProtocolFailure,
    ShapeError,
    UnsupportedRepresentationError,
    ValidityError,
)

SCHEMA_VERSION = 1

PROTOCOL_NAMES = ("fig2", "fig3", "fig4", "qubit-2s-back", "sd-3s-back",
                  "dephased-c2", "erasure-mes", "flagged-opt")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _emit(payload: dict, output: str, timing_ms: float | None):
    if timing_ms is not None:
        payload["wall_time_ms"] = round(timing_ms, 3)
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if output == "-":
        sys.stdout.write(text)
    else:
        with open(output, "w") as fh:
            fh.write(text)


def _emit_text(text: str, output: str):
    if output == "-":
        sys.stdout.write(text)
    else:
        with open(output, "w") as fh:
            fh.write(text)


def _write_trace(path: str, batch_means):
    lines = ["batch_index,batch_mean"]
    lines += [f"{i},{m!r}" for i, m in enumerate(batch_means)]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _estimate_payload(command: str, est, config: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "quantity": est.label,
        "channel": config["channel"],
        "params": config,
        "estimate": est.mean,
        "stderr": est.stderr,
        "samples": est.samples,
        "seed": est.seed,
    }


def cmd_holevo(args) -> dict:
    config = {"command": "holevo", "channel": f"retro-{args.c}-{args.d}"
              + ("-dephased" if args.variant == "dephased" else ""),
              "c": args.c, "d": args.d, "variant": args.variant,
              "samples": args.samples, "seed": args.seed}
    est = estimators.holevo_retro_mc(args.c, args.d, args.samples, args.seed,
                                     variant=args.variant, workers=args.workers)
    if args.trace_out:
        _write_trace(args.trace_out, est.batch_means)
    return _estimate_payload("holevo", est, config)


def cmd_coherent(args) -> dict:
    config = {"command": "coherent", "channel": f"retro-{args.c}-{args.d}",
              "c": args.c, "d": args.d, "samples": args.samples,
              "seed": args.seed}
    est = estimators.coherent_info_retro_mc(args.c, args.d, args.samples,
                                            args.seed, workers=args.workers)
    if args.trace_out:
        _write_trace(args.trace_out, est.batch_means)
    return _estimate_payload("coherent", est, config)


def cmd_protocol(args) -> dict:
    config = {"command": "protocol", "channel": "protocol/" + args.name,
              "name": args.name, "d": args.d, "trials": args.trials,
              "seed": args.seed}
    payload = {"schema_version": SCHEMA_VERSION, "quantity": "protocol",
               "channel": config["channel"], "params": config,
               "seed": args.seed, "trials": args.trials}
    name = args.name
    if name == "fig2":
        res = protocols.run_qubit_via_two_way(args.d, args.trials, args.seed,
                                              keep_traces=False)
    elif name == "fig3":
        res = protocols.run_ebit_via_back(args.d, args.trials, args.seed,
                                          keep_traces=False)
    elif name == "fig4":
        res = protocols.run_qubit_via_ebit(args.d, args.trials, args.seed,
                                           keep_traces=False)
    elif name == "qubit-2s-back":
        res = protocols.run_qubit_via_two_uses_back(args.d, args.trials,
                                                    args.seed, keep_traces=False)
    elif name == "sd-3s-back":
        res = protocols.run_superdense_via_three_uses(args.trials, args.seed)
    elif name == "dephased-c2":
        res = protocols.run_dephased_c2(args.trials, args.seed)
    elif name == "erasure-mes":
        res = protocols.run_erasure_conversion(args.trials, args.seed)
    elif name == "flagged-opt":
        res = protocols.optimize_flagged_rate(seed=args.seed,
                                              sim_trials=args.trials)
    else:
        raise _UsageError(f"unknown protocol {name!r}")

    if isinstance(res, protocols.EchoProtocolResult):
        payload.update({
            "figure_of_merit": "entanglement_fidelity",
            "fidelity": {"min": res.min_fidelity,
                         "mean": float(res.fidelities.mean())},
            "ledger": res.ledger.to_dict(),
            "audit": {"echo_mismatches": res.echo_mismatches,
                      "sources_ok": True},
        })
    elif isinstance(res, protocols.BitProtocolResult):
        payload.update({
            "figure_of_merit": "bit_errors",
            "bit_errors": res.bit_errors,
            "error_rate": res.error_rate,
            "ledger": res.ledger.to_dict(),
            "audit": res.audit,
        })
    elif isinstance(res, protocols.ErasureConversionResult):
        payload.update({
            "figure_of_merit": "erasure_fraction",
            "erasure_fraction": res.erasure_fraction,
            "stderr": res.stderr,
            "misses": res.misses,
            "q2_lower_bound": res.q2_lower_bound,
            "ledger": res.ledger.to_dict(),
        })
    elif isinstance(res, protocols.FlaggedRateResult):
        payload.update({
            "figure_of_merit": "conclusive_clean_rate",
            "rate": res.best_rate,
            "best_weight": res.best_weight,
            "best_angle": res.best_angle,
            "grid_points": res.grid_points,
            "simulation": {"rate": res.sim_rate, "stderr": res.sim_stderr,
                           "misses": res.sim_misses,
                           "trials": res.sim_trials},
        })
    return payload


_CHOI_CHANNELS = ("dephased-retro", "standard-retro", "identity-qubit",
                  "classical-bit", "dephasing", "depolarizing", "erasure")


def cmd_choi(args) -> dict:
    if args.bases.lower() == "haar" or args.unitaries.lower() == "haar":
        raise _UsageError(
            "the Choi representation needs finite flag ensembles; Haar "
            "ensembles are handled by the Monte Carlo estimators "
            "(holevo/coherent commands)")
    if args.bases.upper() != "ZX" or args.unitaries.lower() != "pauli":
        raise _UsageError("supported discretization: --bases ZX --unitaries pauli")
    name = args.channel
    if name == "dephased-retro":
        target = channels.dephased_retro_discretized()
    elif name == "standard-retro":
        target = channels.RetroChannelSpec(
            2, 2, basis_ensemble=(channels.Z_BASIS, channels.X_BASIS),
            unitary_ensemble=channels.pauli_pair_ensemble())
    elif name == "identity-qubit":
        target = channels.identity_qudit(2)
    elif name == "classical-bit":
        target = channels.classical_bit()
    elif name == "dephasing":
        target = channels.dephasing()
    elif name == "depolarizing":
        target = channels.depolarizing(args.p)
    elif name == "erasure":
        target = channels.erasure(args.p)
    else:
        raise _UsageError(f"unknown channel {name!r}")
    choi = channels.choi_matrix(target)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "quantity": "choi",
        "channel": name,
        "params": {"command": "choi", "channel": name, "bases": args.bases,
                   "unitaries": args.unitaries, "check": args.check,
                   "p": args.p},
        "input_dim": choi.input_dim,
        "output_dim": choi.output_dim,
        "flag_count": choi.flag_count,
    }
    if args.check == "ppt":
        ok, min_eig = channels.is_ppt(choi)
        payload["ppt"] = bool(ok)
        payload["min_eigenvalue"] = min_eig
    return payload


def cmd_trend(args) -> str:
    dims = [int(x) for x in args.dims.split(",")]
    config = {"command": "trend", "dims": dims, "samples": args.samples,
              "seed": args.seed}
    points = estimators.trend_scan(dims, args.samples, args.seed,
                                   workers=args.workers)
    lines = ["# config: " + json.dumps(config, sort_keys=True),
             "d,c,estimate,stderr"]
    for pt in points:
        lines.append(f"{pt.d},{pt.c},{pt.estimate.mean!r},{pt.estimate.stderr!r}")
    return "\n".join(lines) + "\n"


def cmd_report(args) -> dict:
    builder = reports.BUILDERS.get(args.channel)
    if builder is None:
        raise _UsageError(
            f"unknown channel {args.channel!r}; choose from "
            f"{sorted(reports.BUILDERS)}")
    if args.channel == reports.R22:
        report = builder(samples=args.samples, seed=args.seed,
                         protocol_trials=args.trials, workers=args.workers)
    elif args.channel == reports.DEPHASED_R22:
        report = builder(samples=args.samples, seed=args.seed,
                         protocol_trials=args.trials, workers=args.workers)
    elif args.channel == reports.SIMPLIFIED:
        report = builder(seed=args.seed)
    else:
        report = builder(seed=args.seed)
    return report.to_dict()


def cmd_ladder(args) -> dict:
    loaded = []
    for path in args.reports:
        with open(path) as fh:
            loaded.append(estimators.CapacityReport.from_dict(json.load(fh)))
    outcome = ladder.check_ladder(loaded)
    return {
        "schema_version": SCHEMA_VERSION,
        "quantity": "ladder",
        "channel": "ladder",
        "params": {"command": "ladder",
                   "channels": [r.channel for r in loaded]},
        "relations": [r.to_dict() for r in ladder.build_ladder()],
        "checks": [c.to_dict() for c in outcome.checks],
        "violations": [c.to_dict() for c in outcome.violations],
    }


def build_parser() -> _Parser:
    parser = _Parser(prog="echochan",
                     description="Retrocorrectable-channel capacity toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, samples=None, trials=None):
        p.add_argument("--seed", type=int, required=True,
                       help="random seed (required for reproducibility)")
        p.add_argument("--workers", type=int, default=1,
                       help="worker processes; results do not depend on this")
        p.add_argument("--output", default="-",
                       help="output path, or - for stdout (default)")
        p.add_argument("--timing", action="store_true",
                       help="include wall_time_ms (breaks byte reproducibility)")
        if samples is not None:
            p.add_argument("--samples", type=int, default=samples)
        if trials is not None:
            p.add_argument("--trials", type=int, default=trials)

    p = sub.add_parser("holevo", help="Monte Carlo one-shot Holevo capacity")
    p.add_argument("--c", type=int, default=2)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--variant", choices=("standard", "dephased"),
                   default="standard")
    p.add_argument("--trace-out", default=None,
                   help="write per-batch means to this CSV path")
    common(p, samples=1_000_000)

    p = sub.add_parser("coherent", help="Monte Carlo one-shot coherent information")
    p.add_argument("--c", type=int, default=2)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--trace-out", default=None)
    common(p, samples=1_000_000)

    p = sub.add_parser("protocol", help="run an echo-assisted protocol")
    p.add_argument("--name", choices=PROTOCOL_NAMES, required=True)
    p.add_argument("--d", type=int, default=2)
    common(p, trials=1000)

    p = sub.add_parser("choi", help="build a Choi matrix and test PPT")
    p.add_argument("--channel", choices=_CHOI_CHANNELS, required=True)
    p.add_argument("--bases", default="ZX")
    p.add_argument("--unitaries", default="pauli")
    p.add_argument("--check", choices=("ppt", "none"), default="ppt")
    p.add_argument("--p", type=float, default=0.5,
                   help="noise parameter for depolarizing/erasure")
    p.add_argument("--output", default="-")
    p.add_argument("--timing", action="store_true")

    p = sub.add_parser("trend", help="Holevo estimates for growing dimensions")
    p.add_argument("--dims", default="2,4,8,16")
    common(p, samples=1000)

    p = sub.add_parser("report", help="build a capacity report for a channel")
    p.add_argument("--channel", required=True)
    common(p, samples=100_000, trials=1000)

    p = sub.add_parser("ladder", help="check capacity reports against the ladder")
    p.add_argument("--reports", nargs="+", required=True)
    p.add_argument("--output", default="-")
    p.add_argument("--timing", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        started = time.monotonic()
        if args.command == "holevo":
            payload = cmd_holevo(args)
        elif args.command == "coherent":
            payload = cmd_coherent(args)
        elif args.command == "protocol":
            payload = cmd_protocol(args)
        elif args.command == "choi":
            payload = cmd_choi(args)
        elif args.command == "trend":
            text = cmd_trend(args)
            _emit_text(text, args.output)
            return 0
        elif args.command == "report":
            payload = cmd_report(args)
        elif args.command == "ladder":
            payload = cmd_ladder(args)
        else:  # pragma: no cover - argparse enforces the choices
            raise _UsageError(f"unknown command {args.command!r}")
        elapsed_ms = (time.monotonic() - started) * 1000.0
        _emit(payload, args.output, elapsed_ms if args.timing else None)
        if args.command == "ladder" and payload["violations"]:
            return 2
        return 0
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (DomainError, ShapeError, UnsupportedRepresentationError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ProtocolFailure, ValidityError, NumericalError) as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return 2
    except EchoChanError as exc:  # pragma: no cover - residual toolkit errors
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
