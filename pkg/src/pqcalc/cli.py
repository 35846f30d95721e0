"""Command-line front end: sign tables, derivative exports, checks, plot data.

Exit codes: 0 success, 1 a hard verification check failed, 2 usage error,
3 file I/O error.  Every artifact written to disk carries the run stamp
(p, level, seed, config hash, tool version) so results can be traced back
to the exact invocation that produced them.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys

import numpy as np

from .function_space import (
    LocallyConstantFn,
    FourierSpectrum,
    builtin_function,
    fourier_forward,
    fourier_inverse,
    log_norm,
    random_spectrum,
)
from .operators import (
    DENSE_CAP,
    derivative_matrix,
    derivative_operator_matrix_free,
)
from .padic_core import Prime, enumerate_dual, parse_prufer
from .seminorms import (
    bmo_oscillation_sequence,
    besov_seminorm_discrete,
    seminorm_report,
)
from .spectral import (
    operator_norm_power_iteration,
    schatten_norm,
    singular_values,
)
from .verify import (
    CHECK_NAMES,
    ExperimentConfig,
    _jsonable,
    any_hard_failure,
    markdown_summary,
    run_all,
    suite_json,
)
from .version import __version__

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3


class UsageError(Exception):
    """Bad flags, malformed specs, or out-of-domain parameters."""


class OutputError(Exception):
    """Filesystem trouble while reading inputs or writing artifacts."""


class _Parser(argparse.ArgumentParser):
    # argparse exits the process on error; raise instead so main() owns the
    # exit code and unknown flags land on the documented usage status
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# serialization helpers


def _canonical_dumps(doc) -> str:
    """Canonical JSON: sorted keys, no whitespace, floats left untouched."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _run_hash(doc) -> str:
    """Short hash of the run parameters, the config-hash stamp for artifacts."""
    payload = _canonical_dumps(_jsonable(doc))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def _stamp(p, level, seed, config_hash) -> dict:
    return {
        "p": int(p),
        "level": int(level),
        "seed": None if seed is None else int(seed),
        "config_hash": config_hash,
        "tool_version": __version__,
    }


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def _write_bytes(path: str, blob: bytes) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(blob)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def _ensure_dir(path: str) -> None:
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create directory {path}: {exc}") from exc


def _read_json_file(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _csv_cell(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _csv_text(stamp: dict, header, rows) -> str:
    """Comma-separated series with the stamp as leading comment lines."""
    lines = [f"# {k}={v}" for k, v in stamp.items()]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_csv_cell(x) for x in row))
    return "\n".join(lines) + "\n"


def _q_key(q: float) -> str:
    if math.isinf(q):
        return "inf"
    if float(q).is_integer():
        return str(int(q))
    return repr(float(q))


def _parse_q_list(text: str):
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if tok.lower() == "inf":
            out.append(math.inf)
            continue
        try:
            q = float(tok)
        except ValueError:
            raise UsageError(f"bad Schatten exponent {tok!r}") from None
        if not q >= 1:
            raise UsageError(f"Schatten exponent must be >= 1, got {tok}")
        out.append(q)
    if not out:
        raise UsageError("empty --q list")
    return out


def _parse_tol_overrides(pairs):
    out = {}
    for item in pairs or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise UsageError(f"--tol-override expects key=value, got {item!r}")
        try:
            out[key] = float(value)
        except ValueError:
            raise UsageError(f"--tol-override value must be a number: {item!r}") from None
    return out


# ---------------------------------------------------------------------------
# function specs


def _coerce_param(text: str):
    """Query-string values: int if possible, then float, else the raw string."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _parse_builtin_spec(spec: str):
    body = spec[len("builtin:"):]
    name, _, query = body.partition("?")
    if not name:
        raise UsageError(f"missing builtin name in {spec!r}")
    params = {}
    if query:
        for pair in query.split("&"):
            key, sep, value = pair.partition("=")
            if not sep or not key:
                raise UsageError(f"bad builtin parameter {pair!r} in {spec!r}")
            params[key] = _coerce_param(value)
    return name, params


def function_to_doc(f: LocallyConstantFn, source=None) -> dict:
    """Portable JSON description of a sampled function (full precision)."""
    doc = {
        "p": int(f.p),
        "level": int(f.level),
        "repr": "values",
        "values": [[float(v.real), float(v.imag)] for v in f.values],
    }
    if source is not None:
        doc["source"] = source
    return doc


def function_from_doc(doc) -> LocallyConstantFn:
    """Rebuild a function from any of the three spec shapes.

    Accepted shapes: {"p","level","values":[[re,im],...]} for pointwise
    samples, {"p","level","entries":[["m/p^n",[re,im]],...]} for a dual
    expansion, and {"p","level","builtin","params"} for a named family.
    """
    if not isinstance(doc, dict):
        raise UsageError("function spec must be a JSON object")
    try:
        p = int(Prime(int(doc["p"])))
        level = int(doc["level"])
    except KeyError as exc:
        raise UsageError(f"function spec is missing {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad function spec: {exc}") from None
    if level < 0:
        raise UsageError("function spec level must be >= 0")

    if "values" in doc:
        raw = doc["values"]
        if len(raw) != p**level:
            raise UsageError(
                f"expected {p ** level} values for p={p} level={level}, got {len(raw)}"
            )
        vals = np.empty(p**level, dtype=np.complex128)
        for j, entry in enumerate(raw):
            if isinstance(entry, (int, float)):
                vals[j] = complex(entry)
            else:
                re, im = entry
                vals[j] = complex(float(re), float(im))
        return LocallyConstantFn(p, level, vals)

    if "entries" in doc:
        pairs = []
        for item in doc["entries"]:
            label, coeff = item
            if isinstance(coeff, (int, float)):
                c = complex(coeff)
            else:
                c = complex(float(coeff[0]), float(coeff[1]))
            pairs.append((label, c))
        try:
            spec = FourierSpectrum.from_entries(p, level, pairs)
        except ValueError as exc:
            raise UsageError(f"bad dual entry: {exc}") from None
        return fourier_inverse(spec)

    if "builtin" in doc:
        try:
            return builtin_function(doc["builtin"], dict(doc.get("params") or {}), p, level)
        except (KeyError, ValueError) as exc:
            raise UsageError(f"bad builtin spec: {exc}") from None

    raise UsageError("function spec needs one of 'values', 'entries', or 'builtin'")


def resolve_function(arg: str, p: int, level: int):
    """Turn a --function argument into (function, reproducible source doc).

    Three forms: builtin:NAME?k=v&..., a path to a JSON file, or inline JSON
    (anything starting with '{').  File and inline specs carry their own p and
    level, which must not contradict the command-line values.
    """
    if arg.startswith("builtin:"):
        name, params = _parse_builtin_spec(arg)
        try:
            f = builtin_function(name, dict(params), p, level)
        except (KeyError, ValueError) as exc:
            raise UsageError(f"bad builtin spec {arg!r}: {exc}") from None
        source = {"p": int(p), "level": int(level), "builtin": name, "params": params}
        return f, source

    if arg.lstrip().startswith("{"):
        try:
            doc = json.loads(arg)
        except json.JSONDecodeError as exc:
            raise UsageError(f"inline function spec is not valid JSON: {exc}") from None
    else:
        doc = _read_json_file(arg)

    f = function_from_doc(doc)
    if f.p != p:
        raise UsageError(f"function spec has p={f.p} but the command asked for p={p}")
    if f.level > level:
        raise UsageError(
            f"function spec is sampled at level {f.level}, finer than --level {level}"
        )
    return f, doc


# ---------------------------------------------------------------------------
# sgn


def cmd_sgn(args) -> int:
    p = int(Prime(args.p))
    if args.alpha is None and not args.all:
        raise UsageError("sgn needs --alpha m/p^n or --all")
    if args.alpha is not None and args.all:
        raise UsageError("--alpha and --all are mutually exclusive")

    if args.alpha is not None:
        try:
            a = parse_prufer(args.alpha, p)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        classes = [a]
        level = a.level
    else:
        level = args.level if args.level is not None else 1
        if level < 0:
            raise UsageError("--level must be >= 0")
        classes = list(enumerate_dual(p, level))

    rows = [(str(a), a.sgn, a.norm) for a in classes]
    run = {"command": "sgn", "p": p, "level": level, "rows": rows}
    stamp = _stamp(p, level, None, _run_hash(run))

    if args.format == "json":
        doc = dict(stamp)
        doc["classes"] = [{"alpha": s, "sgn": g, "norm": n} for s, g, n in rows]
        print(_canonical_dumps(doc))
    elif args.format == "csv":
        sys.stdout.write(_csv_text(stamp, ("alpha", "sgn", "norm"), rows))
    else:
        width = max(5, max(len(s) for s, _, _ in rows))
        print(f"{'alpha':<{width}}  sgn  norm")
        for s, g, n in rows:
            print(f"{s:<{width}}  {g:>3}  {n}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# derivative


def _operator_sparse_doc(matrix: np.ndarray, stamp: dict) -> dict:
    rows, cols = np.nonzero(matrix)
    entries = []
    for r, c in zip(rows.tolist(), cols.tolist()):
        v = matrix[r, c]
        entries.append([r, c, float(v.real), float(v.imag)])
    doc = dict(stamp)
    doc.update(
        {
            "rows": int(matrix.shape[0]),
            "cols": int(matrix.shape[1]),
            "order": "dual-enumeration",
            "entries": entries,
        }
    )
    return doc


def _operator_binary(matrix: np.ndarray) -> bytes:
    """uint64 row/col counts, then row-major float64 [re, im] pairs, all LE."""
    header = np.array(matrix.shape, dtype="<u8").tobytes()
    inter = np.empty(matrix.shape + (2,), dtype="<f8")
    inter[..., 0] = matrix.real
    inter[..., 1] = matrix.imag
    return header + inter.tobytes()


def cmd_derivative(args) -> int:
    p = int(Prime(args.p))
    level = args.level
    if level is None:
        raise UsageError("derivative needs --level")
    if level < 1:
        raise UsageError("--level must be >= 1")
    if args.function is None:
        raise UsageError("derivative needs --function")
    seed = args.seed
    q_list = _parse_q_list(args.q) if args.q is not None else [1.0, 2.0]
    size = p**level

    if size > DENSE_CAP and not args.matrix_free:
        raise UsageError(
            f"p^level = {size} exceeds the dense cap {DENSE_CAP}; "
            "pass --matrix-free for the iterative route"
        )

    f, source = resolve_function(args.function, p, level)
    f_lv = f.promote(level) if f.level < level else f
    fhat = fourier_forward(f_lv)

    run = {
        "command": "derivative",
        "p": p,
        "level": level,
        "seed": seed,
        "q": [_q_key(q) for q in q_list],
        "matrix_free": bool(args.matrix_free),
        "function": source,
    }
    cfg = _run_hash(run)
    stamp = _stamp(p, level, seed, cfg)
    _ensure_dir(args.out)
    written = []

    def emit(name: str, text=None, blob=None):
        path = os.path.join(args.out, name)
        if blob is None:
            _write_text(path, text)
        else:
            _write_bytes(path, blob)
        written.append(path)

    fdoc = dict(stamp)
    fdoc.update(function_to_doc(f, source=source))
    emit("function.json", _canonical_dumps(fdoc))

    besov_params = [(q, q, 1.0 / q) for q in q_list if math.isfinite(q)]
    report = seminorm_report(f_lv, fhat, besov_params)
    sem_doc = dict(stamp)
    sem_doc.update(report.to_json_dict())
    emit("seminorms.json", _canonical_dumps(sem_doc))

    if args.matrix_free:
        D = derivative_operator_matrix_free(f_lv, level)
        sigma1 = operator_norm_power_iteration(D, seed=seed)
        sch_doc = dict(stamp)
        sch_doc["norms"] = {"inf": _jsonable(sigma1)}
        sch_doc["route"] = "power-iteration"
        emit("schatten.json", _canonical_dumps(sch_doc))
        for q in q_list:
            if math.isfinite(q):
                print(
                    f"note: S^{_q_key(q)} skipped, matrix-free route only "
                    "estimates the operator norm",
                    file=sys.stderr,
                )
    else:
        D = derivative_matrix(fhat, level)
        emit("operator.json", _canonical_dumps(_operator_sparse_doc(D.matrix, stamp)))
        emit("operator.bin", blob=_operator_binary(D.matrix))
        meta = dict(stamp)
        meta.update(
            {
                "rows": int(D.matrix.shape[0]),
                "cols": int(D.matrix.shape[1]),
                "dtype": "complex128",
                "layout": "uint64 rows, uint64 cols, then row-major float64 [re,im] pairs, little-endian",
                "payload": "operator.bin",
            }
        )
        emit("operator.meta.json", _canonical_dumps(meta))

        spectrum = singular_values(D)
        emit(
            "spectrum.csv",
            _csv_text(
                stamp,
                ("index", "sigma"),
                [(i, float(s)) for i, s in enumerate(spectrum.sigma)],
            ),
        )
        sch_doc = dict(stamp)
        sch_doc["norms"] = {_q_key(q): _jsonable(schatten_norm(spectrum, q)) for q in q_list}
        sch_doc["route"] = "dense-svd"
        emit("schatten.json", _canonical_dumps(sch_doc))

    for path in written:
        print(path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


_VERIFY_ALIASES = {
    "all": None,
    "rank": "rank-formula",
    "trace": "trace-identity",
    "stability": "finite-rank-stability",
    "approximation": "approximation-chain",
    "compactness": "compactness-proxy",
    "kernel": "hilbert-kernel",
}
for _name in CHECK_NAMES:
    _VERIFY_ALIASES[_name] = _name


def cmd_verify(args) -> int:
    which = _VERIFY_ALIASES.get(args.which)
    if args.which not in _VERIFY_ALIASES:
        choices = ", ".join(sorted(_VERIFY_ALIASES))
        raise UsageError(f"unknown check {args.which!r}; choose from {choices}")

    kwargs = {}
    if args.p is not None:
        kwargs["primes"] = (int(Prime(args.p)),)
    if args.max_level is not None:
        if args.max_level < 1:
            raise UsageError("--max-level must be >= 1")
        primes = kwargs.get("primes", (3, 5, 7))
        kwargs["max_levels"] = {p: args.max_level for p in primes}
    if args.ensemble is not None:
        kwargs["ensemble"] = args.ensemble
    if args.q is not None:
        q_list = _parse_q_list(args.q)
        if any(math.isinf(q) for q in q_list):
            raise UsageError("verify only accepts finite Schatten exponents")
        kwargs["q_list"] = tuple(q_list)
    kwargs["seed"] = args.seed
    kwargs["tol_overrides"] = _parse_tol_overrides(args.tol_override)
    try:
        config = ExperimentConfig(**kwargs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    reports = run_all(config, names=None if which is None else [which])
    payload = suite_json(config, reports)
    table = markdown_summary(reports)
    md = "\n".join(
        [
            "# verification report",
            "",
            f"- tool_version: {__version__}",
            f"- seed: {config.seed}",
            f"- config_hash: {config.config_hash()}",
            "",
            table,
            "",
        ]
    )

    _ensure_dir(args.out)
    json_path = os.path.join(args.out, "report.json")
    md_path = os.path.join(args.out, "report.md")
    _write_text(json_path, payload)
    _write_text(md_path, md)

    if args.format == "json":
        print(payload)
    elif args.format == "csv":
        stamp = {
            "seed": config.seed,
            "config_hash": config.config_hash(),
            "tool_version": __version__,
        }
        rows = [(r.name, r.status) for r in reports]
        sys.stdout.write(_csv_text(stamp, ("check", "status"), rows))
    else:
        print(md)
    print(f"wrote {json_path} and {md_path}", file=sys.stderr)
    return EXIT_CHECK_FAILED if any_hard_failure(reports) else EXIT_OK


# ---------------------------------------------------------------------------
# plotdata


def _save_figure(path: str, draw) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    draw(ax)
    fig.tight_layout()
    try:
        fig.savefig(path, dpi=150)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    finally:
        plt.close(fig)


def _plot_levels(args, p: int):
    top = args.level if args.level is not None else 4
    if top < 1:
        raise UsageError("--level must be >= 1")
    if p**top > DENSE_CAP:
        raise UsageError(
            f"p^level = {p ** top} exceeds the dense cap {DENSE_CAP}; lower --level"
        )
    return list(range(1, top + 1))


def _decay_rows(args, p: int, levels):
    rows = []
    series = {}
    for n in levels:
        if args.function is None:
            f = log_norm(p, n)
        else:
            f, _ = resolve_function(args.function, p, n)
        D = derivative_matrix(fourier_forward(f.promote(n) if f.level < n else f), n)
        sigma = singular_values(D).sigma
        series[n] = sigma
        for i, s in enumerate(sigma):
            rows.append((n, i, float(s)))
    return rows, series


def _vmo_rows(args, p: int):
    level = args.level if args.level is not None else 4
    if level < 1:
        raise UsageError("--level must be >= 1")
    if args.function is None:
        f = log_norm(p, level)
    else:
        f, _ = resolve_function(args.function, p, level)
        f = f.promote(level) if f.level < level else f
    osc = bmo_oscillation_sequence(f)
    return [(n, float(m)) for n, m in enumerate(osc)]


def _ratio_rows(args, p: int, levels, q_list, seed: int):
    rows = []
    trials = args.ensemble
    for n in levels:
        specs = [random_spectrum(p, n, 1.0, (seed, 97, p, n, t)) for t in range(trials)]
        svds = [singular_values(derivative_matrix(fourier_forward(f), n)) for f in specs]
        for q in q_list:
            ratios = []
            for f, sv in zip(specs, svds):
                denom = besov_seminorm_discrete(f, q, q, 1.0 / q)
                num = schatten_norm(sv, q)
                if denom > 0:
                    ratios.append(num / denom)
            med = float(np.median(ratios)) if ratios else math.nan
            rows.append((n, _q_key(q), med))
    return rows


def cmd_plotdata(args) -> int:
    p = int(Prime(args.p))
    seed = args.seed
    q_list = _parse_q_list(args.q) if args.q is not None else [2.0]
    if any(math.isinf(q) for q in q_list):
        raise UsageError("plotdata ratio series needs finite Schatten exponents")
    _ensure_dir(args.out)

    run = {
        "command": "plotdata",
        "kind": args.kind,
        "p": p,
        "level": args.level,
        "seed": seed,
        "q": [_q_key(q) for q in q_list],
        "ensemble": args.ensemble,
        "function": args.function,
    }

    if args.kind == "decay":
        levels = _plot_levels(args, p)
        rows, series = _decay_rows(args, p, levels)
        stamp = _stamp(p, levels[-1], seed, _run_hash(run))
        csv_path = os.path.join(args.out, "decay.csv")
        _write_text(csv_path, _csv_text(stamp, ("level", "index", "sigma"), rows))

        def draw(ax):
            for n in levels:
                sigma = series[n]
                pos = sigma[sigma > 0]
                ax.semilogy(range(1, len(pos) + 1), pos, marker=".", label=f"N={n}")
            ax.set_xlabel("singular value index")
            ax.set_ylabel("sigma")
            ax.set_title(f"derivative spectrum decay, p={p}")
            ax.legend()

        png_path = os.path.join(args.out, "decay.png")
        _save_figure(png_path, draw)

    elif args.kind == "vmo":
        rows = _vmo_rows(args, p)
        stamp = _stamp(p, args.level if args.level is not None else 4, seed, _run_hash(run))
        csv_path = os.path.join(args.out, "vmo.csv")
        _write_text(csv_path, _csv_text(stamp, ("n", "oscillation"), rows))

        def draw(ax):
            ax.plot([r[0] for r in rows], [r[1] for r in rows], marker="o")
            ax.set_xlabel("scale n")
            ax.set_ylabel("max mean oscillation beyond scale n")
            ax.set_title(f"oscillation sequence, p={p}")

        png_path = os.path.join(args.out, "vmo.png")
        _save_figure(png_path, draw)

    else:
        levels = _plot_levels(args, p)
        rows = _ratio_rows(args, p, levels, q_list, seed)
        stamp = _stamp(p, levels[-1], seed, _run_hash(run))
        csv_path = os.path.join(args.out, "ratio.csv")
        _write_text(csv_path, _csv_text(stamp, ("level", "q", "median_ratio"), rows))

        def draw(ax):
            for q in q_list:
                key = _q_key(q)
                pts = [(r[0], r[2]) for r in rows if r[1] == key]
                ax.plot([x for x, _ in pts], [y for _, y in pts], marker="o", label=f"q={key}")
            ax.set_xlabel("level")
            ax.set_ylabel("median Schatten / Besov ratio")
            ax.set_title(f"norm ratio vs level, p={p}")
            ax.legend()

        png_path = os.path.join(args.out, "ratio.png")
        _save_figure(png_path, draw)

    print(csv_path)
    print(png_path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser wiring


def _add_common(sp, *, function=False, q=False, seed_default=42):
    sp.add_argument("--p", type=int, default=3, help="odd prime (default 3)")
    sp.add_argument("--level", type=int, default=None, help="sampling level N")
    if function:
        sp.add_argument(
            "--function",
            default=None,
            help="builtin:NAME?k=v&..., a JSON file path, or inline JSON",
        )
    if q:
        sp.add_argument("--q", default=None, help="comma-separated Schatten exponents")
    sp.add_argument("--seed", type=int, default=seed_default, help="RNG seed")
    sp.add_argument("--out", default=".", help="output directory")
    sp.add_argument(
        "--format",
        choices=("json", "csv", "md"),
        default=None,
        help="stdout format where the command prints a report",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pqcalc", description=__doc__.splitlines()[0])
    parser.add_argument(
        "--version", action="version", version=f"pqcalc {__version__}"
    )
    sub = parser.add_subparsers(dest="command", metavar="command")

    sp = sub.add_parser("sgn", help="print sign and norm of dual classes")
    _add_common(sp)
    sp.add_argument("--alpha", default=None, help="one class, written m/p^n")
    sp.add_argument("--all", action="store_true", help="every class at --level")
    sp.set_defaults(func=cmd_sgn)

    sp = sub.add_parser("derivative", help="export a derivative operator and its spectrum")
    _add_common(sp, function=True, q=True)
    sp.add_argument(
        "--matrix-free",
        action="store_true",
        help="skip dense assembly; only the operator norm is estimated",
    )
    sp.set_defaults(func=cmd_derivative)

    sp = sub.add_parser("verify", help="run verification checks and write reports")
    sp.add_argument(
        "which",
        nargs="?",
        default="all",
        help="all, rank, trace, stability, schatten-besov, approximation, compactness, kernel",
    )
    sp.add_argument("--p", type=int, default=None, help="restrict to one prime")
    sp.add_argument("--max-level", type=int, default=None, help="cap the level grid")
    sp.add_argument("--ensemble", type=int, default=None, help="random trials per cell")
    sp.add_argument("--q", default=None, help="comma-separated Schatten exponents")
    sp.add_argument("--seed", type=int, default=42, help="RNG seed")
    sp.add_argument(
        "--tol-override",
        action="append",
        metavar="KEY=VALUE",
        help="replace a named tolerance (repeatable)",
    )
    sp.add_argument("--out", default=".", help="output directory for report.json/report.md")
    sp.add_argument(
        "--format", choices=("json", "csv", "md"), default="md", help="stdout format"
    )
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("plotdata", help="emit tidy CSV series and PNG figures")
    sp.add_argument(
        "--kind",
        choices=("decay", "vmo", "ratio"),
        default="decay",
        help="decay curves, oscillation sequence, or norm-ratio series",
    )
    _add_common(sp, function=True, q=True)
    sp.add_argument("--ensemble", type=int, default=20, help="trials per level (ratio)")
    sp.set_defaults(func=cmd_plotdata)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "command", None) is None:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SystemExit as exc:
        code = exc.code
        return EXIT_OK if code in (None, 0) else EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
