"""Command-line front end: ``concircular derive | check | integrate``.

Exit codes: 0 pass, 1 check failure, 2 malformed input, 3 runtime domain error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from .expr import MASS, ExpressionSyntaxError, JetOrderError, as_expression, parse, probe_seed
from .expr.zero import DEFAULT_SEED

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_DOMAIN = 0, 1, 2, 3
CHECK_KINDS = ("helmholtz", "zermelo", "symmetry", "first-integral", "theorem")


class InputError(ValueError):
    pass


def _mass(text):
    """Numeric mass, or the symbol ``m`` when omitted."""
    if text is None or str(text).strip() == "m":
        return MASS
    try:
        return as_expression(parse(str(text)).constant_value())
    except (ExpressionSyntaxError, TypeError, ValueError):
        raise InputError(f"--m must be a number or 'm', got {text!r}") from None


def _emit(args, text: str, doc: dict):
    doc = dict(doc, seed=args.seed)
    print(json.dumps(doc, indent=1, sort_keys=True) if args.format == "json" else text)


# ---------------------------------------------------------------------------
# derive


def cmd_derive(args) -> int:
    from .variational import euler_poisson, hamiltonian, resolve_lagrangian

    L = resolve_lagrangian(args.lagrangian, _mass(args.m))
    if L.jet_order() > 1:
        raise InputError(f"Lagrangian must have jet order <= 1 (depends on du at most), got {L.jet_order()}")
    E = euler_poisson(L)
    H = hamiltonian(L)
    doc = {"lagrangian": L.to_text(), "E1": E.E[0].to_text(), "E2": E.E[1].to_text(), "H": H.to_text()}
    text = "\n".join([f"L  = {doc['lagrangian']}", f"E1 = {doc['E1']}", f"E2 = {doc['E2']}", f"H  = {doc['H']}"])
    _emit(args, text, doc)
    return EXIT_OK


# ---------------------------------------------------------------------------
# check


def _source_target(target: str | None, m):
    """Equation preset, ``E1;E2`` expression pair, or JSON file with E1/E2 or a lagrangian."""
    from .variational import SOURCE_PRESETS, SourceForm, euler_poisson, resolve_lagrangian, source_preset

    target = target or "theorem"
    if target in SOURCE_PRESETS:
        return source_preset(target, m)
    path = Path(target)
    if path.suffix == ".json" or path.exists():
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read target file {target}: {exc}") from None
        if "lagrangian" in data:
            return euler_poisson(resolve_lagrangian(str(data["lagrangian"]), m))
        if "E1" in data and "E2" in data:
            return SourceForm((_subs_m(parse(str(data["E1"])), m), _subs_m(parse(str(data["E2"])), m)))
        raise InputError("target file needs either 'lagrangian' or both 'E1' and 'E2'")
    if ";" in target:
        e1, e2 = target.split(";", 1)
        return SourceForm((_subs_m(parse(e1), m), _subs_m(parse(e2), m)))
    raise InputError(f"unknown target {target!r}: use one of {', '.join(SOURCE_PRESETS)}, 'E1;E2' or a JSON file")


def _subs_m(e, m):
    from .expr import M

    return e if m == MASS else e.subs({M: m})


def cmd_check(args) -> int:
    from .variational import (
        CheckReport,
        NonconformantPattern,
        SymmetryGenerator,
        equation_checklist,
        extract_coefficients,
        first_integral_check,
        helmholtz_check,
        resolve_lagrangian,
        symmetry_check,
        verify_theorem,
        zermelo_check,
    )

    m = _mass(args.m)
    kind = args.kind
    try:
        if kind == "theorem":
            if args.target in (None, "theorem"):
                report = verify_theorem(m)
            else:
                report = equation_checklist(_source_target(args.target, m), title=args.target)
        elif kind == "helmholtz":
            c, pattern = extract_coefficients(_source_target(args.target, m))
            if not pattern.conformant:
                raise NonconformantPattern(pattern)
            report = helmholtz_check(c)
        elif kind == "zermelo":
            if args.target is None:
                raise InputError("zermelo needs a Lagrangian target (preset or expression)")
            L = resolve_lagrangian(args.target, m)
            z = zermelo_check(L)
            report = CheckReport(f"zermelo {args.target}")
            report.items.append(_item("condition-3 (zeta1 L = 0, zeta2 L = 0)", z.passes_3))
            report.items.append(_item("condition-4 (zeta1 L = L, zeta2 L = 0)", z.passes_4))
            # parameter invariance needs only one of the two conditions
            doc = report.to_dict()
            doc["passed"] = z.passes
            doc["zeta1"], doc["zeta2"] = z.zeta1.to_text(), z.zeta2.to_text()
            text = report.to_text().splitlines()
            text[0] = f"{report.title}: {'PASS' if z.passes else 'FAIL'}"
            _emit(args, "\n".join(text + [f"  zeta1 L = {doc['zeta1']}", f"  zeta2 L = {doc['zeta2']}"]), doc)
            return EXIT_OK if z.passes else EXIT_FAIL
        elif kind == "symmetry":
            eps_form = _source_target(args.target, m)
            report = CheckReport("symmetry")
            report.add("translation-x1", symmetry_check(eps_form, SymmetryGenerator.translation(1, 0)))
            report.add("translation-x2", symmetry_check(eps_form, SymmetryGenerator.translation(0, 1)))
            report.add("rotation", symmetry_check(eps_form, SymmetryGenerator.rotation(1)))
        else:  # first-integral
            from .variational import lagrangian_preset

            eps_form = _source_target(args.target, m)
            f = lagrangian_preset("curvature") if args.integral in (None, "k") else parse(args.integral)
            report = CheckReport("first-integral")
            report.add(f"d_T({args.integral or 'k'}) on shell", [first_integral_check(eps_form, f)])
    except NonconformantPattern as exc:
        print(f"error: nonconformant equation pattern: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(args, report.to_text(), report.to_dict())
    return EXIT_OK if report.passed else EXIT_FAIL


def _item(name, passed):
    from .variational import CheckItem

    return CheckItem(name, bool(passed))


# ---------------------------------------------------------------------------
# integrate


@dataclass
class ScenarioConfig:
    metric: str = "euclidean"
    equation: str = "myeq"
    gauge: str = "arc-length"
    m: float = 1.0
    ic: tuple = (0.0, 0.0, 1.0, 0.0, 0.0, 1.0)
    method: str = "rk4"
    step: float = 1e-3
    tol: float = 1e-10
    steps: int = 1000
    t_end: float | None = None
    out: str | None = None
    format: str = "csv"
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        self.ic = _parse_ic(self.ic)
        try:
            self.m = float(self.m)
            self.step = float(self.step)
            self.tol = float(self.tol)
            self.steps = int(self.steps)
            self.seed = int(self.seed)
            self.t_end = None if self.t_end is None else float(self.t_end)
        except (TypeError, ValueError) as exc:
            raise InputError(f"bad numeric setting: {exc}") from None
        if self.format not in ("csv", "text"):
            raise InputError("format must be csv or text")
        if not all(math.isfinite(v) for v in self.ic):
            raise InputError("initial state must be finite")


def _parse_ic(ic) -> tuple:
    if isinstance(ic, str):
        ic = ic.replace(";", ",").split(",")
    try:
        vals = tuple(float(v) for v in ic)
    except (TypeError, ValueError):
        raise InputError(f"--ic expects six numbers x1,x2,u1,u2,du1,du2, got {ic!r}") from None
    if len(vals) != 6:
        raise InputError(f"--ic expects six numbers x1,x2,u1,u2,du1,du2, got {len(vals)}")
    return vals


def build_config(args) -> ScenarioConfig:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise InputError("config file must hold a JSON object")
        known = {f.name for f in fields(ScenarioConfig)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InputError(f"unknown config keys: {unknown}")
    for f in fields(ScenarioConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            data[f.name] = v
    return ScenarioConfig(**data)


def cmd_integrate(args) -> int:
    from .geometry import load_metric
    from .integrator import (
        DomainExit,
        IntegrationError,
        IntegrationSettings,
        KinematicState,
        integrate,
        write_csv,
        write_text,
    )
    from .integrator.core import is_identity_metric

    cfg = build_config(args)
    cache = load_metric(cfg.metric).cache()
    try:
        settings = IntegrationSettings(method=cfg.method, step=cfg.step, tol=cfg.tol, max_steps=cfg.steps,
                                       t_end=cfg.t_end, equation=cfg.equation, gauge=cfg.gauge, m=cfg.m)
        init = KinematicState(0.0, cfg.ic[0:2], cfg.ic[2:4], cfg.ic[4:6])
    except ValueError as exc:
        raise InputError(str(exc)) from None
    writer = write_csv if cfg.format == "csv" else write_text
    code = EXIT_OK
    try:
        traj = integrate(cache, init, settings)
    except IntegrationError as exc:
        if exc.trajectory is None:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT if isinstance(exc, DomainExit) else EXIT_DOMAIN
        traj = exc.trajectory
        print(f"error: {exc}; {len(traj)} samples kept", file=sys.stderr)
        code = EXIT_DOMAIN
    if cfg.out:
        writer(traj, cfg.out, seed=cfg.seed)
    parts = [f"samples={len(traj)}", f"sigma_end={traj.sigma[-1]:.6g}", f"s={traj.s[-1]:.6g}",
             f"k0={traj.k[0]:.12g}", f"k-drift={traj.k_drift():.3e}"]
    if is_identity_metric(cache):
        parts.append(f"max|H+k|={traj.h_plus_k():.3e}")
    parts.append(f"myeq-residual={traj.max_residual():.3e}")
    print("summary: " + " ".join(parts))
    return code


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="concircular", description="Second-order variational calculus on 2-D jets "
                                "and geodesic-circle integration.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("derive", help="print the Euler-Poisson expressions and Hamiltonian of a Lagrangian")
    d.add_argument("lagrangian", help="preset (eq1, curvature, signed-curvature, length, curvature-times-length, "
                   "free-particle) or expression text")
    d.add_argument("--m", default=None, help="mass: a number, or omit to keep the symbol m")
    d.add_argument("--format", choices=("text", "json"), default="text")
    d.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for probe-based zero tests")
    d.set_defaults(func=cmd_derive)

    c = sub.add_parser("check", help="run an inverse-problem check")
    c.add_argument("kind", choices=CHECK_KINDS)
    c.add_argument("target", nargs="?", default=None,
                   help="equation preset (theorem, theorem+b-antisymmetric, ...), 'E1;E2', a JSON file, "
                   "or for zermelo a Lagrangian preset or expression")
    c.add_argument("--m", default=None)
    c.add_argument("--integral", default=None, help="first-integral candidate (default k)")
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.add_argument("--seed", type=int, default=DEFAULT_SEED)
    c.set_defaults(func=cmd_check)

    i = sub.add_parser("integrate", help="integrate the Euler-Poisson or geodesic-circle equation")
    i.add_argument("--config", default=None, help="JSON file with the same keys as the flags")
    i.add_argument("--metric", default=None)
    i.add_argument("--equation", choices=("myeq", "geocircle"), default=None)
    i.add_argument("--gauge", choices=("arc-length", "variational"), default=None)
    i.add_argument("--m", type=float, default=None)
    i.add_argument("--ic", default=None, help='"x1,x2,u1,u2,du1,du2"')
    i.add_argument("--method", choices=("rk4", "rk45"), default=None)
    i.add_argument("--step", type=float, default=None)
    i.add_argument("--tol", type=float, default=None)
    i.add_argument("--steps", type=int, default=None)
    i.add_argument("--t-end", dest="t_end", type=float, default=None)
    i.add_argument("--out", default=None)
    i.add_argument("--format", choices=("csv", "text"), default=None)
    i.add_argument("--seed", type=int, default=None)
    i.set_defaults(func=cmd_integrate)
    return p


def main(argv=None) -> int:
    from .geometry import DomainError, MetricError
    from .variational import RouteDisagreement

    args = build_parser().parse_args(argv)
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    try:
        with probe_seed(seed):
            return args.func(args)
    except (InputError, ExpressionSyntaxError, JetOrderError, MetricError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except RouteDisagreement as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
