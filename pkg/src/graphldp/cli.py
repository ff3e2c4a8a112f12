"""Command-line driver for sampling, enumeration, rates, and validation.

Subcommands: sample, measures, enumerate, exact-prob, rate, root,
validate-ldp, validate-coupling.  Exit codes: 0 on success, 2 on domain
or feasibility errors (with a one-line message on stderr), 1 on usage
errors.  All randomness is controlled by --seed; runs that write files
also write a run manifest, atomically and last, listing every output.

Targets are passed either as JSON measure files (--nu FILE --pi FILE) or,
for the single-symbol case, inline: ``--colors 1 --pi C`` abbreviates
the uniform symbol law with pair weight C, and ``--c C`` does the same
while rounding the edge budget to the nearest feasible integer per n.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from fractions import Fraction

from .measures import (
    AlphabetMismatchError,
    DegreeMeasure,
    DomainError,
    NeighbourhoodMeasure,
    PairMeasure,
    SymbolAlphabet,
    SymbolMeasure,
    dump_json,
    from_jsonable,
)
from .rates import (
    lambda_root,
    mean_ratio,
    rate_degree,
    rate_isolated,
    rate_neighbourhood,
)
from .samplers import (
    AllocationOutcome,
    ColoredGraph,
    FeasibilityError,
    GraphParams,
    allocation_empirical_measures,
    empirical_measures,
    sample_allocation,
    sample_colored_graph,
    sample_conditional_graph,
    sample_coupled,
)
from .types_method import (
    EnumerationBudgetError,
    enumerate_type_class,
    exact_type_probability,
)
from .validate import (
    EventSpec,
    ExperimentConfig,
    coupling_probe,
    estimate_event_rate,
    write_coupling_csv,
    write_decay_csv,
    write_manifest,
)

__all__ = ["main"]


class UsageError(Exception):
    """Malformed invocation; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit(2); remap to 1
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="graphldp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")

    def add_targets(p, with_c=True):
        p.add_argument("--colors", type=int, default=1, help="alphabet size")
        p.add_argument("--nu", metavar="FILE", help="symbol-law JSON file")
        p.add_argument(
            "--pi",
            metavar="FILE|C",
            help="pair-measure JSON file, or a number for one color",
        )
        if with_c:
            p.add_argument(
                "--c",
                type=float,
                help="single-color mean degree; edge budget rounded per n",
            )

    p = sub.add_parser("sample", help="draw model samples to JSON files")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--conditional", action="store_true")
    group.add_argument("--allocation", action="store_true")
    group.add_argument("--coupled", action="store_true")
    group.add_argument("--bernoulli", action="store_true")
    p.add_argument("--n", type=int, required=True)
    add_targets(p)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="DIR", help="write files here; default stdout")

    p = sub.add_parser("measures", help="empirical measures of a sample file")
    p.add_argument("file", metavar="FILE")
    p.add_argument("--out", metavar="DIR")

    p = sub.add_parser("enumerate", help="list the type class of (nu, pi, n)")
    p.add_argument("--n", type=int, required=True)
    add_targets(p, with_c=False)
    p.add_argument("--budget", type=int, default=2_000_000)
    p.add_argument("--out", metavar="DIR")

    p = sub.add_parser(
        "exact-prob", help="exact probabilities of types, or of one measure"
    )
    p.add_argument("--n", type=int, required=True)
    add_targets(p, with_c=False)
    p.add_argument("--mu", metavar="FILE", help="one measure instead of all")
    p.add_argument("--budget", type=int, default=2_000_000)
    p.add_argument("--out", metavar="DIR")

    p = sub.add_parser("rate", help="evaluate a rate function")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--isolated", action="store_true")
    mode.add_argument("--degree", metavar="FILE")
    mode.add_argument("--neighbourhood", metavar="FILE")
    p.add_argument("--x", type=float, help="isolated-vertex proportion")
    p.add_argument("--c", type=float, help="mean degree")
    p.add_argument("--grid", metavar="A:B:STEP", help="x grid for --isolated")
    p.add_argument("--nu", metavar="FILE")
    p.add_argument("--pi", metavar="FILE")
    p.add_argument("--out", metavar="DIR")

    p = sub.add_parser("root", help="solve (1-exp(-lambda))/lambda = (1-x)/c")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--c", type=float, required=True)

    p = sub.add_parser("validate-ldp", help="Monte Carlo decay of a rare event")
    p.add_argument(
        "--model",
        choices=["conditional-graph", "allocation", "bernoulli-graph"],
        default="conditional-graph",
    )
    p.add_argument("--x", type=float, required=True, help="isolated-fraction threshold")
    add_targets(p)
    p.add_argument("--grid", metavar="A:B:STEP", required=True, help="n grid")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", metavar="DIR")

    p = sub.add_parser("validate-coupling", help="coupling discrepancy decay")
    add_targets(p)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--grid", metavar="A:B:STEP", required=True, help="n grid")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", metavar="DIR")

    return parser


# ---------------------------------------------------------------------------
# shared helpers


def _load_measure_file(path: str, expect: type):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise DomainError(f"cannot read measure file {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise DomainError(f"malformed JSON in {path}: {exc}") from exc
    obj = from_jsonable(data)
    if not isinstance(obj, expect):
        raise DomainError(
            f"{path} holds a {type(obj).__name__}, expected {expect.__name__}"
        )
    return obj


def _parse_targets(args) -> tuple[SymbolMeasure | None, PairMeasure | None, float | None]:
    """Resolve (--nu, --pi, --c, --colors) into (nu, pi, c)."""
    c = getattr(args, "c", None)
    if c is not None:
        if args.nu or args.pi:
            raise UsageError("--c conflicts with --nu/--pi")
        return None, None, c
    if args.pi is None:
        raise UsageError("targets required: --c, --pi C, or --nu FILE --pi FILE")
    inline = None
    try:
        inline = Fraction(args.pi)  # accepts "1.5" and "4/3" alike, exactly
    except (ValueError, ZeroDivisionError):
        pass
    if inline is not None:
        if args.colors != 1:
            raise UsageError("inline --pi C is only defined for --colors 1")
        if args.nu:
            raise UsageError("inline --pi C conflicts with --nu FILE")
        alphabet = SymbolAlphabet.of_size(1)
        nu = SymbolMeasure(alphabet, (Fraction(1),))
        pi = PairMeasure(alphabet, ((inline,),))
        return nu, pi, None
    if not args.nu:
        raise UsageError(
            f"--pi {args.pi!r} is not a number, and file mode requires --nu FILE"
        )
    nu = _load_measure_file(args.nu, SymbolMeasure)
    pi = _load_measure_file(args.pi, PairMeasure)
    return nu, pi, None


def _fixed_targets(args, n: int) -> tuple[SymbolMeasure, PairMeasure]:
    """Targets quantized for one fixed n (c-mode rounds the edge budget)."""
    nu, pi, c = _parse_targets(args)
    cfg = ExperimentConfig(
        model="allocation",
        event=EventSpec("always"),
        n_grid=(n,),
        samples_per_n=1,
        seed=0,
        c=c,
        nu=nu,
        pi=pi,
    )
    nu_n, pi_n, _ = cfg.targets_for(n)
    return nu_n, pi_n


def _parse_grid(text: str) -> tuple[int, ...]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--grid expects A:B:STEP, got {text!r}")
    try:
        a, b, step = (int(p) for p in parts)
    except ValueError as exc:
        raise UsageError(f"--grid expects integers, got {text!r}") from exc
    if step <= 0 or b < a:
        raise UsageError("--grid needs A <= B and STEP > 0")
    return tuple(range(a, b + 1, step))


def _parse_float_grid(text: str) -> tuple[float, ...]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--grid expects A:B:STEP, got {text!r}")
    try:
        a, b, step = (float(p) for p in parts)
    except ValueError as exc:
        raise UsageError(f"--grid expects numbers, got {text!r}") from exc
    if step <= 0 or b < a:
        raise UsageError("--grid needs A <= B and STEP > 0")
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return tuple(a + i * step for i in range(count))


class _Outputs:
    """Collects written files and finishes with the atomic manifest."""

    def __init__(self, out_dir: str | None, subcommand: str, params: dict):
        self.dir = out_dir
        self.subcommand = subcommand
        self.params = params
        self.files: list[str] = []
        self.started = time.time()
        if out_dir:
            os.makedirs(out_dir, exist_ok=True)

    def path(self, name: str) -> str:
        path = os.path.join(self.dir, name)
        self.files.append(name)
        return path

    def write_text(self, name: str, text: str) -> str:
        path = self.path(name)
        tmp = path + ".tmp"
        with open(tmp, "w", newline="\n") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
        os.replace(tmp, path)
        return path

    def finish(self) -> None:
        if self.dir:
            write_manifest(
                os.path.join(self.dir, "manifest.json"),
                self.subcommand,
                self.params,
                self.files + ["manifest.json"],
                self.started,
            )


def _emit(out: _Outputs, name: str, payload) -> None:
    """Write payload under --out, or print it when no directory was given."""
    text = dump_json(payload)
    if out.dir:
        out.write_text(name, text)
    else:
        print(text)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_sample(args) -> int:
    import numpy as np

    nu, pi, c = _parse_targets(args)
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    n = args.n
    if args.bernoulli:
        if c is None and pi is not None and pi.alphabet.size == 1:
            c = float(pi.entries[0][0])
        if c is None:
            raise DomainError(
                "bernoulli sampling from the command line is single-color; "
                "pass --c (or inline --pi C)"
            )
        alphabet = SymbolAlphabet.of_size(1)
        params = GraphParams(n, SymbolMeasure(alphabet, (Fraction(1),)), ((c,),))
        draw = lambda rng: sample_colored_graph(params, rng)
        model = "bernoulli-graph"
    else:
        nu_n, pi_n = _fixed_targets(args, n)
        if args.conditional:
            draw = lambda rng: sample_conditional_graph(nu_n, pi_n, n, rng)
            model = "conditional-graph"
        elif args.allocation:
            draw = lambda rng: sample_allocation(nu_n, pi_n, n, rng)
            model = "allocation"
        else:
            draw = lambda rng: sample_coupled(nu_n, pi_n, n, rng)
            model = "coupled"

    params_json = {
        "model": model,
        "n": n,
        "samples": args.samples,
        "seed": args.seed,
        "colors": args.colors,
        "c": c,
        "nu": args.nu,
        "pi": args.pi,
    }
    out = _Outputs(args.out, "sample", params_json)
    rng = np.random.default_rng(np.random.SeedSequence([args.seed]))
    for i in range(args.samples):
        sample = draw(rng)
        if model == "coupled":
            payload = {
                "type": "coupled_sample",
                "graph": sample.graph.to_jsonable(),
                "allocation": sample.allocation.to_jsonable(),
                "discrepancies": [list(row) for row in sample.discrepancies],
            }
        else:
            payload = sample.to_jsonable()
        _emit(out, f"sample-{i}.json", payload)
    out.finish()
    return 0


def _cmd_measures(args) -> int:
    try:
        with open(args.file) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise DomainError(f"cannot read {args.file}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise DomainError(f"malformed JSON in {args.file}: {exc}") from exc
    if not isinstance(data, dict):
        raise DomainError(f"{args.file} does not hold a sample object")
    if "profiles" in data:
        outcome = AllocationOutcome.from_jsonable(data)
        nu, pi, mu, deg = allocation_empirical_measures(outcome)
    elif "edges" in data:
        graph = ColoredGraph.from_jsonable(data)
        nu, pi, mu, deg = empirical_measures(graph)
    else:
        raise DomainError(
            f"{args.file}: expected a graph ('edges') or an allocation ('profiles')"
        )
    payload = {
        "type": "empirical_measures",
        "nu": nu.to_jsonable(),
        "pi": pi.to_jsonable(),
        "mu": mu.to_jsonable(),
        "degree": deg.to_jsonable(),
    }
    out = _Outputs(args.out, "measures", {"file": args.file})
    _emit(out, "measures.json", payload)
    out.finish()
    return 0


def _cmd_enumerate(args) -> int:
    nu_n, pi_n = _fixed_targets(args, args.n)
    tc = enumerate_type_class(nu_n, pi_n, args.n, visit_budget=args.budget)
    payload = tc.to_jsonable()
    params = {"n": args.n, "budget": args.budget, "nu": args.nu, "pi": args.pi}
    out = _Outputs(args.out, "enumerate", params)
    _emit(out, "type-class.json", payload)
    out.finish()
    return 0


def _cmd_exact_prob(args) -> int:
    nu_n, pi_n = _fixed_targets(args, args.n)
    params = {
        "n": args.n,
        "budget": args.budget,
        "nu": args.nu,
        "pi": args.pi,
        "mu": args.mu,
    }
    out = _Outputs(args.out, "exact-prob", params)
    if args.mu:
        mu = _load_measure_file(args.mu, NeighbourhoodMeasure)
        prob = exact_type_probability(mu, nu_n, pi_n, args.n)
        payload = {
            "type": "exact_probability",
            "n": args.n,
            "probability": f"{prob.numerator}/{prob.denominator}",
            "probability_float": float(prob),
            "log_probability": None if prob == 0 else _log_fraction(prob),
        }
    else:
        tc = enumerate_type_class(nu_n, pi_n, args.n, visit_budget=args.budget)
        payload = tc.to_jsonable()
        total = tc.total_probability()
        payload["total_probability"] = f"{total.numerator}/{total.denominator}"
    _emit(out, "exact-prob.json", payload)
    out.finish()
    return 0


def _log_fraction(q: Fraction) -> float:
    return math.log(q.numerator) - math.log(q.denominator)


def _cmd_rate(args) -> int:
    if args.isolated:
        if args.c is None:
            raise UsageError("rate --isolated requires --c")
        out = _Outputs(
            args.out,
            "rate",
            {"mode": "isolated", "x": args.x, "c": args.c, "grid": args.grid},
        )
        if args.grid:
            rows = ["x,value,lambda,published"]
            for x in _parse_float_grid(args.grid):
                r = rate_isolated(x, args.c)
                rows.append(
                    f"{x!r},{r.value!r},{r.lam!r},{r.published_closed_form!r}"
                )
            text = "\n".join(rows) + "\n"
            if out.dir:
                out.write_text("rates.csv", text)
            else:
                print(text, end="")
        else:
            if args.x is None:
                raise UsageError("rate --isolated requires --x or --grid")
            result = rate_isolated(args.x, args.c)
            _emit(out, "rate.json", result.to_jsonable())
        out.finish()
        return 0
    if args.degree:
        if args.c is None:
            raise UsageError("rate --degree requires --c")
        d = _load_measure_file(args.degree, DegreeMeasure)
        value = rate_degree(d, args.c)
        out = _Outputs(args.out, "rate", {"mode": "degree", "c": args.c})
        _emit(
            out,
            "rate.json",
            {"type": "rate", "mode": "degree", "c": args.c, "value": _json_real(value)},
        )
        out.finish()
        return 0
    # neighbourhood mode
    if not args.nu or not args.pi:
        raise UsageError("rate --neighbourhood requires --nu FILE and --pi FILE")
    mu = _load_measure_file(args.neighbourhood, NeighbourhoodMeasure)
    nu = _load_measure_file(args.nu, SymbolMeasure)
    pi = _load_measure_file(args.pi, PairMeasure)
    value = rate_neighbourhood(mu, nu, pi)
    out = _Outputs(args.out, "rate", {"mode": "neighbourhood"})
    _emit(
        out,
        "rate.json",
        {"type": "rate", "mode": "neighbourhood", "value": _json_real(value)},
    )
    out.finish()
    return 0


def _json_real(v: float):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    return v


def _cmd_root(args) -> int:
    lam = lambda_root(args.x, args.c)
    target = (1.0 - args.x) / args.c
    residual = 0.0 if math.isinf(lam) else mean_ratio(lam) - target
    print(
        dump_json(
            {
                "type": "root",
                "x": args.x,
                "c": args.c,
                "lambda": _json_real(lam),
                "residual": residual,
            }
        )
    )
    return 0


def _cmd_validate_ldp(args) -> int:
    nu, pi, c = _parse_targets(args)
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    cfg = ExperimentConfig(
        model=args.model,
        event=EventSpec("isolated-fraction-ge", threshold=args.x),
        n_grid=_parse_grid(args.grid),
        samples_per_n=args.samples,
        seed=args.seed,
        c=c,
        nu=nu,
        pi=pi,
        workers=args.workers,
    )
    estimate = estimate_event_rate(cfg)
    out = _Outputs(args.out, "validate-ldp", cfg.to_jsonable())
    for est in estimate.per_n:
        tail = (
            f"rate={est.rate:.6f}"
            if est.rate is not None
            else f"censored, rate >= {est.rate_lower_bound:.6f}"
        )
        print(
            f"n={est.n} hits={est.hits}/{est.samples} "
            f"p_hat={est.p_hat:.3e} {tail}"
        )
    summary = estimate.extrapolated_rate()
    if summary is not None:
        print(f"extrapolated rate: {summary[0]:.6f} +- {summary[1]:.6f}")
    if out.dir:
        write_decay_csv(out.path("decay.csv"), estimate)
        out.write_text("decay.json", dump_json(estimate.to_jsonable()))
    out.finish()
    return 0


def _cmd_validate_coupling(args) -> int:
    nu, pi, c = _parse_targets(args)
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    probe = coupling_probe(
        nu,
        pi,
        _parse_grid(args.grid),
        args.eps,
        args.samples,
        args.seed,
        c=c,
        workers=args.workers,
    )
    params = {
        "eps": args.eps,
        "grid": args.grid,
        "samples": args.samples,
        "seed": args.seed,
        "c": c,
    }
    out = _Outputs(args.out, "validate-coupling", params)
    for est in probe.per_n:
        tail = "censored" if est.censored else f"rate={est.rate:.6f}"
        print(
            f"n={est.n} hits={est.hits}/{est.samples} p_hat={est.p_hat:.3e} "
            f"meanB={est.mean_discrepancies:.4f} {tail}"
        )
    if out.dir:
        write_coupling_csv(out.path("coupling.csv"), probe)
        out.write_text("coupling.json", dump_json(probe.to_jsonable()))
    out.finish()
    return 0


_COMMANDS = {
    "sample": _cmd_sample,
    "measures": _cmd_measures,
    "enumerate": _cmd_enumerate,
    "exact-prob": _cmd_exact_prob,
    "rate": _cmd_rate,
    "root": _cmd_root,
    "validate-ldp": _cmd_validate_ldp,
    "validate-coupling": _cmd_validate_coupling,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.subcommand:
            parser.print_usage(sys.stderr)
            return 1
        return _COMMANDS[args.subcommand](args)
    except UsageError as exc:
        print(f"graphldp: usage error: {exc}", file=sys.stderr)
        return 1
    except (
        DomainError,
        FeasibilityError,
        EnumerationBudgetError,
        AlphabetMismatchError,
    ) as exc:
        print(f"graphldp: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
