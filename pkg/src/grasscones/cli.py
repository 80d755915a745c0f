"""Command-line front end: certify, table, verify, list."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import exterior, jordan, lawlor, oracle, projector
from .algebra import AlgebraField
from .lawlor import CaseFlag, Verdict

EXIT_OK, EXIT_USAGE, EXIT_INCONCLUSIVE, EXIT_VERIFY = 0, 1, 2, 3
CSV_COLUMNS = ("family", "k", "alpha_sq", "theta_deg", "radius_deg", "verdict", "status")

DEFAULTS = {
    "profile": "auto",
    "tolerance": lawlor.DEFAULT_RTOL,
    "oracle_budget": oracle.DEFAULT_BUDGET,
    "resolution": 1e-3,
    "samples": 48,
    "oriented_max_m": 10,
    "sup_tol": 1e-6,
}


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class FamilySpec:
    kind: str  # GRASSMANN, PROJECTIVE, CAYLEY, ORIENTED
    n: int | None = None
    m: int | None = None
    field: str | None = None

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        if kind == "GRASSMANN":
            self._need_field()
            if not (self.m >= 2 * self.n >= 4):
                raise UsageError(f"grassmann needs m >= 2n >= 4, got n={self.n}, m={self.m}")
        elif kind == "PROJECTIVE":
            self._need_field()
            if self.n != 1:
                raise UsageError(f"projective spaces have n = 1, got n={self.n}")
            if self.m < 2:
                raise UsageError(f"projective needs m >= 2, got m={self.m}")
        elif kind == "ORIENTED":
            if self.n is None or self.m is None or not 2 <= self.n <= self.m - 2:
                raise UsageError(f"oriented needs 2 <= n <= m - 2, got n={self.n}, m={self.m}")
        elif kind == "CAYLEY":
            if self.n is not None or self.m is not None:
                raise UsageError("cayley takes no parameters")
        else:
            raise UsageError(f"unknown family kind {self.kind!r}")

    def _need_field(self):
        if self.n is None or self.m is None or self.field is None:
            raise UsageError(f"{self.kind.lower()} needs n, m and a field")
        try:
            f = AlgebraField.from_tag(self.field)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if f.d > 4:
            raise UsageError("field must be one of R, C, H")
        object.__setattr__(self, "field", f.symbol)

    def cone_case(self) -> lawlor.ConeCase:
        if self.kind in ("GRASSMANN", "PROJECTIVE"):
            return projector.cone_family(self.n, self.m, self.field)
        if self.kind == "ORIENTED":
            return exterior.oriented_cone_family(self.n, self.m)
        return jordan.cayley_cone_case()

    def oracle_family(self):
        if self.kind in ("GRASSMANN", "PROJECTIVE"):
            return oracle.ProjectorFamily(self.n, self.m, self.field)
        if self.kind == "ORIENTED":
            return oracle.PlueckerFamily(self.n, self.m)
        return oracle.CayleyFamily()

    def radius_tag(self) -> str:
        if self.kind == "CAYLEY":
            return "2pi/3"
        if self.kind == "ORIENTED":
            return "pi/2"
        arg = 1 - Fraction(self.m, self.n * (self.m - self.n))
        named = {Fraction(0): "pi/2", Fraction(-1): "pi", Fraction(-1, 2): "2pi/3", Fraction(1, 2): "pi/3"}
        return named.get(arg, f"arccos({arg})")


def parse_family(tokens) -> FamilySpec:
    if not tokens:
        raise UsageError("missing family")
    kind, *rest = tokens
    kind = kind.lower()
    try:
        if kind == "cayley":
            if rest:
                raise UsageError("cayley takes no parameters")
            return FamilySpec("CAYLEY")
        if kind == "oriented":
            if len(rest) != 2:
                raise UsageError("usage: oriented N M")
            return FamilySpec("ORIENTED", int(rest[0]), int(rest[1]))
        if kind == "projective":
            if len(rest) == 2:
                return FamilySpec("PROJECTIVE", 1, int(rest[0]), rest[1])
            if len(rest) == 3:
                return FamilySpec("PROJECTIVE", int(rest[0]), int(rest[1]), rest[2])
            raise UsageError("usage: projective [1] M FIELD")
        if kind == "grassmann":
            if len(rest) != 3:
                raise UsageError("usage: grassmann N M FIELD")
            return FamilySpec("GRASSMANN", int(rest[0]), int(rest[1]), rest[2])
    except ValueError as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"bad integer in {tokens}: {exc}") from None
    raise UsageError(f"unknown family kind {kind!r}")


@dataclass
class ReportRow:
    family: str
    k: int
    alpha_sq: float
    theta_deg: float | None
    radius_deg: float
    verdict: str
    status: str
    theta_rad: float | None = None
    radius_rad: float = 0.0
    radius_tag: str = ""
    profile: str | None = None
    flag: str = "NONE"
    reason: str = ""
    checks: dict = field(default_factory=dict)

    def csv_values(self):
        th = "" if self.theta_deg is None else f"{self.theta_deg:.2f}"
        return [self.family, self.k, _fmt_num(self.alpha_sq), th, f"{self.radius_deg:.2f}", self.verdict, self.status]


def _fmt_num(x: float) -> str:
    return f"{x:.6g}"


def oracle_sup_status(spec: FamilySpec, case, opts) -> tuple[str, dict]:
    fam = spec.oracle_family()
    if fam.N > opts["oracle_budget"]:
        return "UNVERIFIED_NUMERIC", {"ambient_dim": fam.N}
    sf = oracle.fd_second_form(fam.patch(True))
    got = oracle.max_h_squared(sf.tables).value
    err = abs(got - case.alpha_sq)
    info = {"oracle_sup": got, "sup_error": err}
    return ("ORACLE_VERIFIED" if err <= opts["sup_tol"] else "ORACLE_FAILED"), info


def certify_row(spec: FamilySpec, opts, use_oracle=True) -> ReportRow:
    case = spec.cone_case()
    cert = lawlor.certify(case, opts["profile"], rtol=opts["tolerance"])
    if cert.verdict is Verdict.TOTALLY_GEODESIC or not use_oracle:
        status, info = "CLOSED_FORM", {}
    else:
        status, info = oracle_sup_status(spec, case, opts)
    return ReportRow(
        family=case.family,
        k=case.k,
        alpha_sq=case.alpha_sq,
        theta_deg=cert.theta_deg,
        radius_deg=math.degrees(case.normal_radius),
        verdict=cert.verdict.value,
        status=status,
        theta_rad=cert.theta,
        radius_rad=case.normal_radius,
        radius_tag=spec.radius_tag(),
        profile=None if cert.profile is None else cert.profile.value,
        flag=case.flag.value,
        reason=cert.reason,
        checks=info,
    )


def row_exit(rows) -> int:
    if any(r.status == "ORACLE_FAILED" for r in rows):
        return EXIT_VERIFY
    if any(r.verdict == Verdict.INCONCLUSIVE.value for r in rows):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


# ---------------------------------------------------------------------------
# tables

GRASSMANN_SMALL = [(2, 4, "R"), (2, 5, "R"), (2, 6, "R"), (2, 7, "R"), (3, 6, "R"), (2, 4, "C")]
PROJECTIVE_SMALL = [(3, "C"), (4, "C"), (5, "C"), (6, "C"), (3, "H")]

SUMMARY = [
    ("G(n,m;R)", "{X in H(m;R) | tr X = 0}", "Kerckhove(94)", "Except RP^2"),
    ("G(n,m;C)", "{X in H(m;C) | tr X = 0}", "Kerckhove(94)", "All"),
    ("G(n,m;H)", "{X in H(m;H) | tr X = 0}", "Kanno(02)", "All"),
    ("OP^2", "{X in H(3;O) | tr X = 0}", "Ohno,etc(15)", "Yes"),
    ("G~(2,2l+1;R)", "so(2l+1)", "Hirohashi,etc(00)", "l >= 3"),
    ("G~(2,2l;R)", "so(2l)", "Kanno(02)", "l >= 4"),
]


def table_specs(which: str, opts) -> list[FamilySpec]:
    if which == "grassmann-small":
        return [FamilySpec("GRASSMANN", n, m, f) for n, m, f in GRASSMANN_SMALL]
    if which == "projective":
        return [FamilySpec("PROJECTIVE", 1, m, f) for m, f in PROJECTIVE_SMALL]
    if which == "oriented":
        return [FamilySpec("ORIENTED", n, m) for m in range(4, int(opts["oriented_max_m"]) + 1)
                for n in range(2, m // 2 + 1)]
    raise UsageError(f"unknown table {which!r}")


def _summary_sample(label: str, opts):
    """Specimens certified for the computed column of the summary table."""
    if label.startswith("G(n,m;"):
        f = label[6]
        specs = [FamilySpec("GRASSMANN", n, m, f) for m in range(4, 11) for n in range(2, m // 2 + 1)]
        specs += [FamilySpec("PROJECTIVE", 1, m, f) for m in range(3, 8)]
        return specs
    if label == "OP^2":
        return [FamilySpec("CAYLEY")]
    if label == "G~(2,2l+1;R)":
        return [FamilySpec("ORIENTED", 2, 2 * l + 1) for l in range(2, 6)]
    return [FamilySpec("ORIENTED", 2, 2 * l) for l in range(2, 6)]


def summary_rows(opts) -> list[dict]:
    out = []
    for label, ambient, origin, claim in SUMMARY:
        rows = [certify_row(s, opts, use_oracle=False) for s in _summary_sample(label, opts)]
        bad = [r.family + ("" if r.flag == "NONE" else f" [{r.flag}]") for r in rows if r.verdict != "MINIMIZING"]
        computed = "all MINIMIZING" if not bad else "MINIMIZING except " + ", ".join(bad)
        out.append({"family": label, "ambient": ambient, "originally_from": origin, "minimizing": claim,
                    "computed": f"{computed} (sample of {len(rows)})", "status": "CLOSED_FORM"})
    return out


# ---------------------------------------------------------------------------
# verify


@dataclass
class CheckResult:
    name: str
    status: str  # PASS, FAIL, SKIPPED_BUDGET, N/A
    residual: float | None = None
    detail: str = ""


def verify_checks(spec: FamilySpec, opts) -> list[CheckResult]:
    fam = spec.oracle_family()
    if fam.N > opts["oracle_budget"]:
        note = f"ambient dimension {fam.N} > budget {opts['oracle_budget']}"
        return [CheckResult(n, "SKIPPED_BUDGET", None, note)
                for n in ("sup_h_squared", "second_form", "minimality", "normal_radius", "cone_scaling")]
    case = spec.cone_case()
    out = []
    tol = opts["sup_tol"]

    def add(name, err, limit, detail=""):
        out.append(CheckResult(name, "PASS" if err <= limit else "FAIL", float(err), detail))

    try:
        sf = oracle.fd_second_form(fam.patch(True))
    except oracle.ConvergenceError as exc:
        return [CheckResult("second_form", "FAIL", None, str(exc))]
    got = oracle.max_h_squared(sf.tables).value
    add("sup_h_squared", abs(got - case.alpha_sq), tol, f"oracle {got:.12g} vs closed {case.alpha_sq:.12g}")
    out.append(second_form_check(spec, fam, tol))
    tr = float(np.abs(np.trace(sf.tables, axis1=1, axis2=2)).max()) if sf.tables.size else 0.0
    add("minimality", tr, 1e-8)
    rad = oracle.numeric_normal_radius(fam, resolution=opts["resolution"], n_samples=int(opts["samples"]),
                                       budget=opts["oracle_budget"])
    add("normal_radius", abs(rad.radius - case.normal_radius), opts["resolution"],
        f"numeric {rad.radius:.9f} vs closed {case.normal_radius:.9f} ({len(rad.hits)} hits)")
    sc = oracle.cone_scaling_check(fam.patch(True), 2.0)
    add("cone_scaling", max(sc.table_error, sc.eigen_error), 1e-8, "t = 2")
    return out


def second_form_check(spec: FamilySpec, fam, tol) -> CheckResult:
    """Closed-form second fundamental form against finite differences, frame-invariantly."""
    if spec.kind in ("GRASSMANN", "PROJECTIVE"):
        sf = oracle.fd_second_form(fam.patch(False))
        P0 = projector.origin(spec.n, spec.m, spec.field)
        tb = projector.tangent_basis(spec.n, spec.m, spec.field)
        K = len(tb)
        closed = np.zeros((K, K, fam.N))
        for i in range(K):
            for j in range(i, K):
                closed[i, j] = closed[j, i] = projector.to_vector(projector.gauss_second_form(tb[i], tb[j], P0))
        closed = np.einsum("abN,qN,qM->abM", closed, sf.normals, sf.normals)
        err = float(np.abs(sf.projected_hessian() - closed).max())
        return CheckResult("second_form", "PASS" if err <= tol else "FAIL", err, "Gauss formula vs finite differences")
    if spec.kind == "CAYLEY":
        fd = jordan.chart_second_derivatives(1e-3)
        err = float(np.abs(fd - jordan.chart_second_derivatives_closed()).max())
        return CheckResult("second_form", "PASS" if err <= tol else "FAIL", err, "chart derivatives vs closed form")
    sf = oracle.fd_second_form(fam.patch(True))
    n, m = spec.n, spec.m
    tables = exterior.pluecker_second_form(n, m)
    K = n * (m - n)
    closed = np.zeros((K, K, fam.N))
    for key, H in tables.items():
        j, k, b, g = key
        vec = exterior.replaced(n, m, (j, k), (b, g)).to_array()
        closed += H[:, :, None] * vec
    err = float(np.abs(sf.projected_hessian() - closed).max())
    return CheckResult("second_form", "PASS" if err <= tol else "FAIL", err, "structure-equation coefficients vs finite differences")


# ---------------------------------------------------------------------------
# output


def render_rows(rows: list[ReportRow], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow(r.csv_values())
        return buf.getvalue()
    if fmt == "json":
        return json.dumps([asdict(r) for r in rows], indent=2, sort_keys=True) + "\n"
    head = ["family", "dim C", "sup|h|^2", "theta (deg)", "radius", "radius (deg)", "profile", "verdict", "status", "flag"]
    body = []
    for r in rows:
        body.append([r.family, str(r.k), _fmt_num(r.alpha_sq), "-" if r.theta_deg is None else f"{r.theta_deg:.2f}",
                     r.radius_tag, f"{r.radius_deg:.2f}", r.profile or "-", r.verdict, r.status, r.flag])
    return _align(head, body)


def _align(head, body) -> str:
    widths = [max(len(str(x)) for x in col) for col in zip(head, *body)]
    lines = ["  ".join(str(x).ljust(w) for x, w in zip(row, widths)).rstrip() for row in [head] + body]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def render_dicts(rows: list[dict], fmt: str) -> str:
    if not rows:
        return ""
    keys = list(rows[0])
    if fmt == "json":
        return json.dumps(rows, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    return _align(keys, [[str(r[k]) for k in keys] for r in rows])


def render_checks(spec_label: str, checks: list[CheckResult], fmt: str) -> str:
    rows = [{"family": spec_label, "check": c.name, "status": c.status,
             "residual": "" if c.residual is None else f"{c.residual:.3e}", "detail": c.detail} for c in checks]
    if fmt == "json":
        rows = [dict(r, residual=c.residual) for r, c in zip(rows, checks)]
    return render_dicts(rows, fmt)


# ---------------------------------------------------------------------------
# argument handling


def read_config(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            k, v = (s.strip() for s in line.split("=", 1))
            out[k.replace("-", "_")] = v
    return out


def resolve_options(args) -> dict:
    opts = dict(DEFAULTS)
    if args.config:
        for k, v in read_config(args.config).items():
            if k not in DEFAULTS:
                raise UsageError(f"unknown config key {k!r}")
            opts[k] = v
    for k in ("profile", "tolerance", "oracle_budget", "resolution"):
        v = getattr(args, k, None)
        if v is not None:
            opts[k] = v
    try:
        opts["tolerance"] = float(opts["tolerance"])
        opts["oracle_budget"] = int(opts["oracle_budget"])
        opts["resolution"] = float(opts["resolution"])
        opts["samples"] = int(opts["samples"])
        opts["sup_tol"] = float(opts["sup_tol"])
        opts["oriented_max_m"] = int(opts["oriented_max_m"])
    except ValueError as exc:
        raise UsageError(f"bad option value: {exc}") from None
    if str(opts["profile"]).lower() not in ("f", "exp", "auto"):
        raise UsageError(f"profile must be f, exp or auto, got {opts['profile']!r}")
    opts["profile"] = str(opts["profile"]).lower()
    if opts["profile"] != "auto":
        opts["profile"] = opts["profile"].upper()
    if not opts["tolerance"] > 0 or not opts["resolution"] > 0 or opts["oracle_budget"] < 0:
        raise UsageError("tolerance and resolution must be positive, budget non-negative")
    return opts


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "csv", "json"), default="text")
    common.add_argument("--profile", choices=("f", "exp", "auto"), default=None)
    common.add_argument("--tolerance", type=float, default=None, help="relative ODE tolerance")
    common.add_argument("--oracle-budget", dest="oracle_budget", type=int, default=None,
                        help="largest ambient dimension checked numerically")
    common.add_argument("--resolution", type=float, default=None, help="radius-search step (radians)")
    common.add_argument("--config", default=None, help="key=value file with option defaults")
    p = argparse.ArgumentParser(prog="grasscones", description="Area-minimizing cones over Grassmannians.")
    sub = p.add_subparsers(dest="verb", required=True)
    c = sub.add_parser("certify", parents=[common], help="certify one family")
    c.add_argument("family", nargs="+", metavar="FAMILY", help="grassmann N M F | projective [1] M F | cayley | oriented N M")
    c.add_argument("--no-oracle", action="store_true", help="skip the numeric sup cross-check")
    t = sub.add_parser("table", parents=[common], help="reproduce a table")
    t.add_argument("which", choices=("grassmann-small", "projective", "summary", "oriented"))
    t.add_argument("--no-oracle", action="store_true")
    t.add_argument("--max-m", dest="max_m", type=int, default=None, help="largest m for the oriented table")
    v = sub.add_parser("verify", parents=[common], help="run the numeric oracle checks")
    v.add_argument("family", nargs="+", metavar="FAMILY")
    sub.add_parser("list", parents=[common], help="list families and tables")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    out = sys.stdout
    try:
        opts = resolve_options(args)
        if args.verb == "certify":
            spec = parse_family(args.family)
            rows = [certify_row(spec, opts, use_oracle=not args.no_oracle)]
            out.write(render_rows(rows, args.format))
            if args.format == "text":
                out.write(f"reason: {rows[0].reason}\n")
            return row_exit(rows)
        if args.verb == "table":
            if args.max_m is not None:
                opts["oriented_max_m"] = args.max_m
            if args.which == "summary":
                out.write(render_dicts(summary_rows(opts), args.format))
                return EXIT_OK
            rows = [certify_row(s, opts, use_oracle=not args.no_oracle) for s in table_specs(args.which, opts)]
            out.write(render_rows(rows, args.format))
            return EXIT_VERIFY if any(r.status == "ORACLE_FAILED" for r in rows) else EXIT_OK
        if args.verb == "verify":
            spec = parse_family(args.family)
            checks = verify_checks(spec, opts)
            out.write(render_checks(spec.cone_case().family, checks, args.format))
            return EXIT_VERIFY if any(c.status == "FAIL" for c in checks) else EXIT_OK
        if args.verb == "list":
            out.write(render_dicts(catalog(), args.format))
            return EXIT_OK
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (lawlor.ConstraintExceeded, lawlor.NoConvergence, projector.InvalidFamily, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


def catalog() -> list[dict]:
    return [
        {"family": "grassmann N M F", "range": "m >= 2n >= 4, F in {R, C, H}", "radius": "arccos(1 - m/(n(m-n)))"},
        {"family": "projective [1] M F", "range": "m >= 2, F in {R, C, H}", "radius": "arccos(-1/(m-1))"},
        {"family": "cayley", "range": "-", "radius": "2pi/3"},
        {"family": "oriented N M", "range": "2 <= n <= m - 2", "radius": "pi/2"},
        {"family": "table grassmann-small", "range": "6 rows, dim C <= 12", "radius": "-"},
        {"family": "table projective", "range": "CP^2..CP^5, HP^2", "radius": "-"},
        {"family": "table summary", "range": "static provenance + computed sample", "radius": "-"},
        {"family": "table oriented", "range": "2 <= n <= m/2, m <= --max-m (10)", "radius": "-"},
    ]


if __name__ == "__main__":
    sys.exit(main())
