"""Command-line entry point.

Every subcommand reads an optional JSON input file, runs the library and
prints a RunReport. Scalars travel as exact "num/den" strings; floats only
appear in fields whose name says they come from a numerical oracle.

Exit codes: 0 success, 1 a check failed, 2 the input was rejected.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

from . import __version__, cubicform, curves, liealg, threeform
from .algebra import Matrix, Scalar
from .checks import SUITES, CheckResult, run_suites, to_witness
from .errors import G2Error, InputError
from .exterior import AltForm

DEFAULT_SEED = 20240601
DEFAULT_COUNT = 10
U64_MAX = 2 ** 64 - 1

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2


@dataclass
class RunReport:
    command: str
    inputs_digest: str
    results: dict[str, Any] = field(default_factory=dict)
    checks: list[dict[str, Any]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c["status"] == "pass" for c in self.checks)

    def to_json(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "results": self.results,
            "checks": self.checks,
        }


def canonical_json(obj: object) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def inputs_digest(command: str, data: object, args: dict[str, Any]) -> str:
    payload = canonical_json({"command": command, "input": data, "args": args})
    return "sha256:" + hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _check(name: str, passed: bool, witness: object = None, cases: int = 1) -> dict[str, Any]:
    return CheckResult(name, passed, cases, witness).to_json()


# --------------------------------------------------------------------------
# input


def load_input(path: str | None) -> object:
    if path is None:
        return None
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read input file: {exc.strerror or exc}", path=path) from None
    except UnicodeDecodeError:
        raise InputError("input file is not UTF-8 text", path=path) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc.msg} (column {exc.colno})", path=path, line=exc.lineno) from None


def _field(data: object, key: str, path: str) -> object:
    if not isinstance(data, dict) or key not in data:
        raise InputError(f"missing field '{key}'", path=f"{path}.{key}" if path else key)
    return data[key]


def _parse(path: str, fn: Callable[[object], Any], data: object) -> Any:
    """Run a from_json reader and attach ``path`` to any complaint."""
    try:
        return fn(data)
    except InputError:
        raise
    except (ValueError, TypeError, KeyError, AttributeError) as exc:
        raise InputError(str(exc) or type(exc).__name__, path=path) from None


def _form_input(data: object) -> tuple[AltForm, AltForm | None, AltForm | None]:
    """A bare AltForm, or {"form", "vol_ref"?, "symp"?}."""
    if isinstance(data, dict) and "form" in data:
        form = _parse("form", AltForm.from_json, data["form"])
        vol = _parse("vol_ref", AltForm.from_json, data["vol_ref"]) if data.get("vol_ref") is not None else None
        symp = _parse("symp", AltForm.from_json, data["symp"]) if data.get("symp") is not None else None
        return form, vol, symp
    return _parse("", AltForm.from_json, data), None, None


# --------------------------------------------------------------------------
# subcommands


def _invariants7(form: AltForm, vol: AltForm | None) -> dict[str, Any]:
    d = threeform.SevenFormData(form) if vol is None else threeform.SevenFormData(form, vol)
    k = threeform.kappa(d)
    out: dict[str, Any] = {
        "dim": 7,
        "kappa": k.to_json(),
        "c": threeform.bilinear_c(d).to_json(),
        "stabilizer_dim": liealg.stabilizer_dim([form])[0],
    }
    if k:
        try:
            out["metric"] = threeform.metric_from_rho(d).to_json()
        except G2Error as exc:
            out["metric"] = None
            out["metric_unavailable"] = {"code": exc.code, "message": str(exc)}
    else:
        out["metric"] = None
    return out


def _invariants6(form: AltForm, vol: AltForm | None, symp: AltForm | None) -> dict[str, Any]:
    kwargs: dict[str, AltForm] = {}
    if vol is not None:
        kwargs["vol_ref"] = vol
    if symp is not None:
        kwargs["symp"] = symp
    d = threeform.SixFormData(form, **kwargs)
    k = threeform.k_omega(d)
    lam = threeform.lambda_invariant(d)
    out: dict[str, Any] = {
        "dim": 6,
        "K": k.to_json(),
        "lambda": lam.to_json(),
        "kernel_dim": len(k.nullspace()),
        "primitive": d.is_primitive(),
        "stabilizer_dim": liealg.stabilizer_dim([form])[0],
        "stabilizer_dim_with_symp": liealg.stabilizer_dim([d.symp, form])[0],
    }
    try:
        plus, minus = threeform.eigenspaces_w(d)
        out["eigenspaces"] = {"plus": to_witness(plus), "minus": to_witness(minus)}
    except G2Error as exc:
        out["eigenspaces"] = None
        out["eigenspaces_unavailable"] = {"code": exc.code, "message": str(exc)}
    return out


def cmd_invariants(data: object, args: argparse.Namespace) -> RunReport:
    if data is None:
        raise InputError("invariants needs --input with a 3-form")
    form, vol, symp = _form_input(data)
    if form.degree != 3 or form.dim not in (6, 7):
        raise InputError(f"expected a 3-form in 6 or 7 dimensions, got degree {form.degree} in {form.dim}", path="form")
    if form.dim == 7:
        results = _invariants7(form, vol)
    else:
        results = _invariants6(form, vol, symp)
    return RunReport("invariants", "", results)


def cmd_stabilizer(data: object, args: argparse.Namespace) -> RunReport:
    if data is None:
        raise InputError("stabilizer needs --input with a form or {\"forms\": [...]}")
    if isinstance(data, dict) and "forms" in data:
        raw = data["forms"]
        if not isinstance(raw, list) or not raw:
            raise InputError("'forms' must be a non-empty array", path="forms")
        forms = [_parse(f"forms[{k}]", AltForm.from_json, f) for k, f in enumerate(raw)]
    else:
        forms = [_parse("", AltForm.from_json, data)]
    dim, basis = liealg.stabilizer_dim(forms)
    results = {
        "ambient_dim": forms[0].dim,
        "stabilizer_dim": dim,
        "basis": [b.mat.to_json() for b in basis] if getattr(args, "basis", False) else None,
    }
    return RunReport("stabilizer", "", results)


def cmd_charpoly(data: object, args: argparse.Namespace) -> RunReport:
    if data is None:
        raise InputError("charpoly needs --input with {\"matrix\": [[...]]}")
    mat = _parse("matrix", Matrix.from_json, _field(data, "matrix", ""))
    if not mat.is_square:
        raise InputError("matrix must be square", path="matrix")
    p = liealg.char_poly(mat)
    results: dict[str, Any] = {"charpoly": p.to_json(), "charpoly_text": str(p)}
    checks = []
    if mat.nrows == 7:
        try:
            inv = liealg.g2_invariants(mat)
            results["g2"] = inv.to_json()
            checks.append(_check("g2_shape", True))
        except G2Error as exc:
            results["g2"] = None
            checks.append(_check("g2_shape", False, {"message": str(exc), "witness": to_witness(exc.witness)}))
    return RunReport("charpoly", "", results, checks)


def cmd_curve(data: object, args: argparse.Namespace) -> RunReport:
    if data is None:
        raise InputError("curve needs --input with {g_base, f, q}")
    c = _parse("", curves.CurveFamily.from_json, data)
    dual = curves.dualize(c)
    disc = curves.discriminant(c)
    bad = c.genericity_witness()
    results = {
        "curve": c.to_json(),
        "dual": dual.to_json(),
        "discriminant": disc.delta.to_json(),
        "discriminant_text": str(disc.delta),
        "numerology": curves.numerology(c.g_base),
        "degree_bounds": c.degree_bounds,
        "generic": bad is None,
    }
    twice = curves.dualize(dual)
    checks = [
        _check("discriminant_factored", disc.matches_factored, disc.delta),
        _check("discriminant_dual", disc.matches_dual, disc.delta),
        _check("involution", twice == c, twice),
        _check(
            "smooth",
            bad is None,
            None if bad is None else {"reason": bad[0], "gcd": bad[1].to_json()},
        ),
    ]
    return RunReport("curve", "", results, checks)


def _cubic_instance(c: curves.CurveFamily, ts: Sequence[cubicform.TangentVec]) -> tuple[dict, list[dict]]:
    value = cubicform.cubic_form(c, *ts, parallel=True).value
    d = curves.dualize(c)
    dual_ts = [cubicform.dual_tangent(c, t) for t in ts]
    dual_value = cubicform.cubic_form(d, *dual_ts, parallel=True).value
    approx, scale = cubicform.cubic_form_numeric(c, *ts)
    err = cubicform.oracle_relative_error(value, approx, scale)
    results = {
        "value": value.to_json(),
        "dual_value": dual_value.to_json(),
        "invariant": value == dual_value,
        "oracle_float_value": [approx.real, approx.imag],
        "oracle_float_relative_error": err,
    }
    checks = [
        _check("invariance", value == dual_value, {"value": value.to_json(), "dual_value": dual_value.to_json()}),
        _check("float_oracle", err <= 1e-9, {"relative_error": err}),
    ]
    return results, checks


def cmd_cubic(data: object, args: argparse.Namespace) -> RunReport:
    certificates = {
        "cos6": cubicform.verify_cos6_identity(),
        "bvw": cubicform.verify_bvw_identity(),
    }
    cert_checks = [_check(f"certificate_{k}", v) for k, v in sorted(certificates.items())]
    if data is None:
        # seeded random suite
        rng = random.Random(f"{args.seed}:cubic-cli")
        instances = []
        checks: list[dict] = []
        bad_invariance: list[object] = []
        worst = 0.0
        for _ in range(args.count):
            c, *ts = cubicform.random_instance(rng)
            res, chk = _cubic_instance(c, ts)
            instances.append({"curve": c.to_json(), "tangents": [t.to_json() for t in ts], **res})
            worst = max(worst, res["oracle_float_relative_error"])
            if not res["invariant"]:
                bad_invariance.append(instances[-1])
        checks.append(_check("invariance", not bad_invariance, bad_invariance[:1], cases=args.count))
        checks.append(_check("float_oracle", worst <= 1e-9, {"worst_relative_error": worst}, cases=args.count))
        results = {"mode": "random", "certificates": certificates, "instances": instances,
                   "oracle_float_worst_relative_error": worst}
        return RunReport("cubic", "", results, cert_checks + checks)
    c = _parse("curve", curves.CurveFamily.from_json, _field(data, "curve", ""))
    raw = _field(data, "tangents", "")
    if not isinstance(raw, list) or len(raw) != 3:
        raise InputError("'tangents' must be an array of three tangent vectors", path="tangents")
    ts = [_parse(f"tangents[{k}]", cubicform.TangentVec.from_json, t) for k, t in enumerate(raw)]
    res, chk = _cubic_instance(c, ts)
    results = {"mode": "instance", "certificates": certificates, **res}
    return RunReport("cubic", "", results, cert_checks + chk)


def cmd_check(data: object, args: argparse.Namespace) -> RunReport:
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    outcome = run_suites(names, args.seed, args.count)
    checks = [r.to_json() for r in outcome]
    results = {
        "suites": names,
        "seed": args.seed,
        "count": args.count,
        "passed": sum(r.passed for r in outcome),
        "failed": sum(not r.passed for r in outcome),
    }
    return RunReport("check", "", results, checks)


COMMANDS: dict[str, Callable[[object, argparse.Namespace], RunReport]] = {
    "invariants": cmd_invariants,
    "stabilizer": cmd_stabilizer,
    "charpoly": cmd_charpoly,
    "curve": cmd_curve,
    "cubic": cmd_cubic,
    "check": cmd_check,
}


# --------------------------------------------------------------------------
# output


def _pretty(v: object) -> object:
    """Render [a, b, c, d] Scalar encodings as field elements for text output."""
    if isinstance(v, list):
        if len(v) == 4 and all(isinstance(x, str) for x in v):
            try:
                return str(Scalar.from_json(v))
            except ValueError:
                pass
        return [_pretty(x) for x in v]
    if isinstance(v, dict):
        return {k: _pretty(x) for k, x in v.items()}
    return v


def _flat(v: list) -> bool:
    return all(not isinstance(x, (dict, list)) for x in v)


def _text_lines(obj: object, indent: str = "") -> list[str]:
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, dict) and v or isinstance(v, list) and not _flat(v):
                lines.append(f"{indent}{k}:")
                lines.extend(_text_lines(v, indent + "  "))
            else:
                lines.append(f"{indent}{k}: {canonical_json(v)}")
    elif isinstance(obj, list):
        for v in obj:
            lines.append(f"{indent}- {canonical_json(v)}")
    else:
        lines.append(f"{indent}{canonical_json(obj)}")
    return lines


def render(payload: dict[str, Any], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=True) + "\n"
    if "error" in payload:
        err = payload["error"]
        where = f" at {err['path']}" if err.get("path") else ""
        line = f" (line {err['line']})" if err.get("line") else ""
        return f"error [{err['code']}]{where}{line}: {err['message']}\n"
    lines = [f"command: {payload['command']}", f"inputs_digest: {payload['inputs_digest']}", "results:"]
    lines.extend(_text_lines(_pretty(payload["results"]), "  "))
    lines.append("checks:")
    for c in payload["checks"]:
        extra = f" ({c['cases']} cases)" if c.get("cases", 1) != 1 else ""
        lines.append(f"  [{c['status'].upper()}] {c['name']}{extra}")
        if c["status"] == "fail":
            lines.append(f"    witness: {canonical_json(_pretty(c.get('witness')))}")
    return "\n".join(lines) + "\n"


def error_payload(exc: BaseException) -> dict[str, Any]:
    if isinstance(exc, InputError):
        err = {"code": exc.code, "message": str(exc), "path": exc.path, "line": exc.line}
    elif isinstance(exc, G2Error):
        err = {"code": exc.code, "message": str(exc), "path": "", "line": None,
               "witness": to_witness(exc.witness)}
    elif isinstance(exc, (ValueError, TypeError, KeyError, ZeroDivisionError, AssertionError)):
        err = {"code": "input", "message": str(exc) or type(exc).__name__, "path": "", "line": None}
    else:
        err = {"code": "internal", "message": f"{type(exc).__name__}: {exc}", "path": "", "line": None}
    return {"error": err}


# --------------------------------------------------------------------------
# argument parsing


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v <= U64_MAX:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _count(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("count must be >= 0")
    return v


class _Parser(argparse.ArgumentParser):
    """Usage errors become structured InputErrors instead of exiting."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise InputError(f"usage: {message}", path="argv")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--input", "-i", metavar="PATH", help="JSON input file")
    common.add_argument("--seed", type=_u64, default=DEFAULT_SEED, help=f"64-bit seed (default {DEFAULT_SEED})")
    common.add_argument("--count", type=_count, default=DEFAULT_COUNT, help="random cases per property")
    common.add_argument("--output", choices=("json", "text"), default="json")

    p = _Parser(prog="g2spectral", description="Exact checks for G2 spectral data.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("invariants", parents=[common], help="kappa/metric (dim 7) or K/lambda (dim 6) of a 3-form")
    st = sub.add_parser("stabilizer", parents=[common], help="dimension of the common stabilizer of forms")
    st.add_argument("--basis", action="store_true", help="include a basis of the stabilizer")
    sub.add_parser("charpoly", parents=[common], help="characteristic polynomial, with (f, q) for g2 shapes")
    sub.add_parser("curve", parents=[common], help="numerology, discriminant and dual of a curve family")
    sub.add_parser("cubic", parents=[common], help="cubic form and its invariance under duality")
    ck = sub.add_parser("check", parents=[common], help="run the randomized property suites")
    ck.add_argument("suite", nargs="?", default="all", choices=["all", *sorted(SUITES)])
    return p


def _digest_args(args: argparse.Namespace) -> dict[str, Any]:
    out = {"seed": args.seed, "count": args.count}
    for name in ("suite", "basis"):
        if hasattr(args, name):
            out[name] = getattr(args, name)
    return out


def run(argv: Sequence[str] | None = None) -> tuple[int, dict[str, Any], str]:
    """Parse, execute and return (exit code, payload, output format)."""
    try:
        args = build_parser().parse_args(argv)
    except InputError as exc:
        fmt = "text" if argv and "text" in argv else "json"
        return EXIT_INPUT_ERROR, error_payload(exc), fmt
    try:
        data = load_input(args.input)
        report = COMMANDS[args.command](data, args)
    except (G2Error, ValueError, TypeError, KeyError, ZeroDivisionError, AssertionError, RecursionError) as exc:
        return EXIT_INPUT_ERROR, error_payload(exc), args.output
    report.inputs_digest = inputs_digest(args.command, data, _digest_args(args))
    payload = report.to_json()
    return (EXIT_OK if report.ok else EXIT_CHECK_FAILED), payload, args.output


def main(argv: Sequence[str] | None = None) -> int:
    try:
        code, payload, fmt = run(argv)
    except SystemExit as exc:  # --help and --version
        return 0 if exc.code in (0, None) else EXIT_INPUT_ERROR
    except Exception as exc:  # last resort: still a structured object
        code, payload, fmt = EXIT_INPUT_ERROR, error_payload(exc), "json"
    sys.stdout.write(render(payload, fmt))
    return code


if __name__ == "__main__":
    raise SystemExit(main())
