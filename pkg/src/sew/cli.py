"""
Command-line experiment harness.

Every subcommand writes one report: CSV (comment header, column row, one row
per sweep point) or a single JSON document. The header embeds the resolved
configuration, the package version and a git-style SHA-1 of the data body, so
a report can be regenerated from its own header. Wall-clock time goes to a
sidecar file next to ``--output`` and never into the report itself.

Exit status: 0 on success, 2 on usage errors and violated theorem hypotheses,
1 on anything else.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import entropy as E
from . import widths as W
from .errors import HypothesisViolation, SewError
from .harmonics import (
    BlockSelection,
    basis_values,
    evaluate_basis,
    grid_for,
    lowest_selection,
    lp_norm,
    nikolskii_bound,
    random_points,
)
from .norms import DualNorm, EuclideanNorm, InducedNorm, levy_mean
from .operators import SobolevSpec, sample_sobolev_ball
from .spectra import ManifoldModel, parse_manifold, spectrum, weyl_count, weyl_limit, weyl_ratio

__all__ = ["ExperimentConfig", "Report", "parse_sweep", "run", "main", "render"]

# not part of the embedded config: they cannot change the report body
_VOLATILE = ("threads", "output", "config")


@dataclass
class Report:
    columns: list
    rows: list
    extra: dict = field(default_factory=dict)  # JSON-only payload


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    values: dict

    def embedded(self) -> dict:
        return {k: v for k, v in sorted(self.values.items()) if k not in _VOLATILE}

    def __getattr__(self, name):
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name) from None


def parse_sweep(text: str) -> list:
    """``a:b`` doubles from ``a`` up to ``b``; ``a:b:+s`` steps by ``s``; ``a,b,c`` lists."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            lo, hi = int(parts[0]), int(parts[1])
            if len(parts) == 2:
                if lo < 1:
                    raise ValueError
                out = []
                while lo <= hi:
                    out.append(lo)
                    lo *= 2
            elif len(parts) == 3 and parts[2].startswith("+"):
                step = int(parts[2][1:])
                if step < 1:
                    raise ValueError
                out = list(range(lo, hi + 1, step))
            else:
                raise ValueError
        else:
            out = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad sweep {text!r}: use a:b, a:b:+s or a,b,c") from None
    if not out:
        raise argparse.ArgumentTypeError(f"empty sweep {text!r}")
    return out


def _exponent(text: str) -> float:
    t = str(text).strip().lower()
    if t in ("inf", "infinity", "oo"):
        return math.inf
    try:
        v = float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad exponent {text!r}") from None
    if not v >= 1:
        raise argparse.ArgumentTypeError(f"exponent must be >= 1, got {text!r}")
    return v


def _manifold(text: str) -> str:
    try:
        return parse_manifold(text).label
    except SewError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# ---------------------------------------------------------------- helpers


def _model(cfg) -> ManifoldModel:
    return parse_manifold(cfg.manifold)


def _spectrum_above(model, a):
    n_max = max(int(math.isqrt(int(a))) + 2, 4)
    while True:
        spec = spectrum(model, n_max)
        if spec.eigenvalues[-1] >= a:
            return spec
        n_max *= 2


def _basis(sel):
    return evaluate_basis(sel.model, sel, grid_for(sel))


def _induced(model, n, p):
    spec = spectrum(model, n + 1)
    return InducedNorm(_basis(lowest_selection(spec, n)), p)


# ---------------------------------------------------------------- commands


def cmd_spectrum(cfg) -> Report:
    spec = spectrum(_model(cfg), cfg.N)
    rows = [[k, int(spec.eigenvalues[k]), int(spec.multiplicities[k]), int(spec.dims[k])] for k in range(spec.n_max + 1)]
    return Report(["k", "eigenvalue", "multiplicity", "tau"], rows)


def cmd_weyl(cfg) -> Report:
    model = _model(cfg)
    limit = weyl_limit(model)
    spec = _spectrum_above(model, max(cfg.n_sweep))
    rows = []
    for a in cfg.n_sweep:
        r = weyl_ratio(spec, a)
        rows.append([a, weyl_count(spec, a), r, limit, abs(r / limit - 1)])
    return Report(["a", "count", "ratio", "limit", "relative_deviation"], rows)


def cmd_addition_check(cfg) -> Report:
    model = _model(cfg)
    spec = spectrum(model, cfg.N)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    pts = random_points(model, cfg.samples, rng)
    rows = []
    for k in range(spec.n_max + 1):
        sel = BlockSelection.from_spectrum(spec, [k])
        diag = np.sum(basis_values(sel, pts) ** 2, axis=0)
        dk = int(spec.multiplicities[k])
        rows.append([k, dk, float(np.max(np.abs(diag - dk)) / dk)])
    return Report(["k", "multiplicity", "max_relative_deviation"], rows)


def cmd_nikolskii(cfg) -> Report:
    model = _model(cfg)
    rows = []
    for deg in cfg.n_sweep:
        spec = spectrum(model, deg)
        sel = BlockSelection.contiguous(spec, 0, deg)
        basis = _basis(sel)
        x0 = basis.grid.points[:1]
        kx = (basis.at(x0).T @ basis.table)[0]
        n = sel.n
        l2 = float(lp_norm(kx, basis.grid, 2))
        ratio_pq = float(lp_norm(kx, basis.grid, cfg.p)) / float(lp_norm(kx, basis.grid, cfg.q))
        rows.append([deg, n, float(kx[0]), float(np.max(np.abs(kx))), float(np.max(np.abs(kx))) / l2,
                     math.sqrt(n), ratio_pq, nikolskii_bound(n, cfg.p, cfg.q)])
    return Report(["N", "n", "kernel_diagonal", "kernel_sup", "extremal_ratio", "sqrt_n", "kernel_ratio_pq", "bound_pq"], rows)


def cmd_levy_mean(cfg) -> Report:
    model = _model(cfg)
    rows = []
    for n in cfg.n_sweep:
        est = levy_mean(_induced(model, n, cfg.p), cfg.samples, cfg.seed, cfg.threads)
        rows.append([n, est.mean, est.stderr])
    return Report(["n", "mean", "stderr"], rows)


def cmd_dual_levy(cfg) -> Report:
    model = _model(cfg)
    rows = []
    for n in cfg.n_sweep:
        est = levy_mean(DualNorm(_induced(model, n, cfg.p)), cfg.samples, cfg.seed, cfg.threads)
        rows.append([n, est.mean, est.stderr])
    return Report(["n", "dual_mean", "stderr"], rows)


def cmd_entropy_bounds(cfg) -> Report:
    rows = []
    for n in cfg.n_sweep:
        lo = E.sobolev_entropy_lower(n, cfg.gamma, cfg.d, cfg.p, cfg.q)
        up = E.sobolev_entropy_upper(n, cfg.gamma, cfg.d, cfg.p, cfg.q)
        rows.append([n, lo, up, up / lo])
    return Report(["n", "lower", "upper", "ratio"], rows, {"constants": 1})


def cmd_covering(cfg) -> Report:
    rows = []
    for n in cfg.n_sweep:
        lam = np.arange(1, n + 1, dtype=np.float64) ** (-cfg.gamma / cfg.d)
        detroot = float(np.exp(np.mean(np.log(lam))))
        pts = E.body_samples(EuclideanNorm(n), cfg.samples, cfg.seed, linear=lam)
        metric = lambda x: np.linalg.norm(x, axis=-1)  # noqa: E731
        ks = range(n, 4 * n + 1) if cfg.k is None else [cfg.k]
        for k in ks:
            upper, lower = E.empirical_covering(pts, metric, k)
            formula = E.entropy_lower_bound(detroot, 1.0, 1.0, k, n)
            rows.append([n, k, upper.radius, lower.radius, formula, lower.radius >= formula])
    return Report(["n", "k", "covering_upper", "packing_lower", "formula_lower", "consistent"], rows)


def cmd_volume_ratio(cfg) -> Report:
    model = _model(cfg)
    rows = []
    for n in cfg.n_sweep:
        nm = _induced(model, n, cfg.p)
        vr = E.volume_ratio(nm, cfg.samples, cfg.seed, cfg.threads)
        radius = nikolskii_bound(n, 2.0, cfg.p)
        hm = E.hit_or_miss_ratio(nm, cfg.samples, cfg.seed, radius, cfg.threads)
        lm = levy_mean(nm, cfg.samples, cfg.seed, cfg.threads)
        rows.append([n, vr.mean, vr.stderr, hm.mean, hm.stderr, 1.0 / lm.mean, lm.stderr / lm.mean ** 2])
    return Report(["n", "volume_ratio", "stderr", "hit_or_miss", "hit_or_miss_stderr", "inverse_levy_mean", "inverse_levy_stderr"], rows)


def cmd_width_blocks(cfg) -> Report:
    model = _model(cfg)
    sup = W.admissible_eps(cfg.gamma, model.d, cfg.q)
    eps = cfg.eps if cfg.eps is not None else (0.75 * sup if math.isfinite(sup) else 1.0)
    spec = W.spectrum_for_allocation(model, cfg.N, cfg.gamma, eps)
    alloc = W.allocate_ranks(spec, cfg.N, cfg.gamma, model.d, cfg.q, eps)
    checks = W.allocation_checks(alloc)
    b = alloc.boundaries
    rows = [[k, b[k], b[k + 1], alloc.block_dims[k], alloc.ranks[k], alloc.kept[k]] for k in range(alloc.M + 1)]
    extra = {
        "allocation": alloc.as_dict(),
        "checks": checks,
        "envelope_delta": W.envelope_delta(alloc).tolist(),
        "worst_case_l2_error": W.worst_case_error(alloc),
    }
    return Report(["k", "first_index_exclusive", "last_index", "block_dim", "rank", "kept"], rows, extra)


def cmd_approximant_sweep(cfg) -> Report:
    model = _model(cfg)
    d = model.d
    sup = W.admissible_eps(cfg.gamma, d, cfg.q)
    eps = cfg.eps if cfg.eps is not None else (0.75 * sup if math.isfinite(sup) else 1.0)
    rows = []
    for big_n in cfg.n_sweep:
        spec = W.spectrum_for_allocation(model, big_n, cfg.gamma, eps)
        alloc = W.allocate_ranks(spec, big_n, cfg.gamma, d, cfg.q, eps)
        sel = BlockSelection.contiguous(spec, 1, 4 * big_n)
        basis = _basis(sel)
        x = sample_sobolev_ball(SobolevSpec(cfg.gamma, cfg.q, spec), basis, cfg.samples, cfg.seed)
        errs = []
        for rule in ("truncate", "random-subspace"):
            resid = x - W.build_approximant(x, alloc, rule, seed=cfg.seed)
            errs.append(float(np.max(lp_norm(basis.synthesize(resid), basis.grid, cfg.q))))
        rows.append([big_n, alloc.tau_N, alloc.mu, alloc.dimension, *errs, W.worst_case_error(alloc),
                     float(spec.eigenvalues[big_n]) ** (-cfg.gamma / 2)])
    return Report(["N", "tau_N", "mu", "dimension", "sup_error_truncate", "sup_error_random_subspace",
                   "worst_case_truncate_l2", "theta_N_power"], rows)


def cmd_ptj_check(cfg) -> Report:
    rows = []
    for n in cfg.n_sweep:
        rep = W.ptj_check(n, cfg.q, cfg.lam, cfg.samples, cfg.seed, target=cfg.target)
        c = np.array(rep.constants)
        rows.append([n, rep.s, rep.q_prime, rep.lam, rep.levy_mean, float(c.min()), float(np.median(c)),
                     float(c.max()), rep.target, rep.fraction_within_target, rep.exists])
    return Report(["n", "s", "q_prime", "lam", "levy_mean", "min_constant", "median_constant", "max_constant",
                   "target", "fraction_within_target", "exists"], rows)


def cmd_bernstein_check(cfg) -> Report:
    model = _model(cfg)
    rows = []
    for m in cfg.n_sweep:
        rep = W.bernstein_check(spectrum(model, m), m, cfg.gamma, cfg.q, cfg.seed, cfg.samples)
        md = rep.metadata
        rows.append([m, rep.n, rep.value, md["radius"], md["max_ratio"], md["contained"], md["top_block_max_deviation"]])
    return Report(["M", "n", "b_n_order", "radius", "max_ratio", "contained", "top_block_max_deviation"], rows)


# name -> (handler, help, default overrides)
COMMANDS = {
    "spectrum": (cmd_spectrum, "eigenvalues, multiplicities and tau_k up to --N", {"N": 10}),
    "weyl": (cmd_weyl, "Weyl ratio n(a) a^{-d/2} for a in --n-sweep", {"n_sweep": "100:1000000"}),
    "addition-check": (cmd_addition_check, "addition formula at --samples random points, degrees 0..--N", {"N": 20, "samples": 200}),
    "nikolskii": (cmd_nikolskii, "reproducing kernel identities for blocks 0..N, N in --n-sweep", {"n_sweep": "2:16", "p": math.inf, "q": 2.0}),
    "levy-mean": (cmd_levy_mean, "Levy mean of the induced L_p norm; n in --n-sweep", {"n_sweep": "8:256", "samples": 100_000}),
    "dual-levy": (cmd_dual_levy, "Levy mean of the dual of the induced L_p norm", {"n_sweep": "8:64", "samples": 2000}),
    "entropy-bounds": (cmd_entropy_bounds, "Sobolev entropy lower/upper formulas", {"n_sweep": "8:4096"}),
    "covering": (cmd_covering, "greedy covering/packing of a diagonal ellipsoid vs the volumetric lower bound", {"n_sweep": "2,3", "samples": 20_000}),
    "volume-ratio": (cmd_volume_ratio, "volume ratio by sphere average and hit-or-miss", {"n_sweep": "2,3,4", "p": 4.0, "samples": 1_000_000}),
    "width-blocks": (cmd_width_blocks, "dyadic block allocation with invariant checks", {"N": 16}),
    "approximant-sweep": (cmd_approximant_sweep, "sup approximation error vs budget mu over N in --n-sweep", {"n_sweep": "8:64", "samples": 100, "q": 2.0}),
    "ptj-check": (cmd_ptj_check, "random-subspace probe of the proportional subspace inequality", {"n_sweep": "16", "q": 4.0, "samples": 200}),
    "bernstein-check": (cmd_bernstein_check, "Bernstein containment on random z in T_M, M in --n-sweep", {"n_sweep": "8,16", "q": 2.0, "samples": 1000}),
}

_COMMON = {
    "manifold": "circle",
    "n_sweep": "8",
    "p": 2.0,
    "q": 2.0,
    "gamma": 2.0,
    "d": 1,
    "N": 16,
    "samples": 10_000,
    "seed": None,
    "threads": 1,
    "output": None,
    "format": "csv",
    "k": None,
    "lam": 0.5,
    "eps": None,
    "target": 1.0,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sew", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"sew {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (_, help_text, defaults) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        d = {**_COMMON, **defaults}
        if name == "width-blocks":
            d["format"] = "json"
        p.add_argument("--manifold", type=_manifold, default=d["manifold"], help="circle, sphereD or torusD")
        p.add_argument("--n-sweep", type=parse_sweep, default=parse_sweep(d["n_sweep"]),
                       help="a:b (doubling), a:b:+s (step s) or a,b,c; default %(default)s")
        p.add_argument("--p", type=_exponent, default=d["p"], help="source exponent (accepts inf)")
        p.add_argument("--q", type=_exponent, default=d["q"], help="target exponent (accepts inf)")
        p.add_argument("--gamma", type=float, default=d["gamma"], help="smoothness")
        p.add_argument("--d", type=int, default=d["d"], help="manifold dimension used by formulas")
        p.add_argument("--N", type=int, default=d["N"], help="base degree / spectrum length")
        p.add_argument("--k", type=int, default=d["k"], help="entropy index (covering)")
        p.add_argument("--lam", type=float, default=d["lam"], help="subspace fraction (ptj-check)")
        p.add_argument("--eps", type=float, default=d["eps"], help="allocation parameter")
        p.add_argument("--target", type=float, default=d["target"], help="constant threshold (ptj-check)")
        p.add_argument("--samples", type=int, default=d["samples"], help="Monte Carlo samples / trials")
        p.add_argument("--seed", type=int, default=d["seed"], help="seed (falls back to $SEW_SEED, then 0)")
        p.add_argument("--threads", type=int, default=d["threads"], help="worker cap; never changes results")
        p.add_argument("--output", default=d["output"], help="report path (stdout if omitted)")
        p.add_argument("--format", choices=("csv", "json"), default=d["format"])
        p.add_argument("--config", default=None, help="flat key=value file; its values override flags")
    return parser


def _config_args(path: str) -> list:
    args = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise argparse.ArgumentTypeError(f"{path}:{lineno}: expected key=value")
            key, value = (x.strip() for x in line.split("=", 1))
            args += ["--" + key.replace("_", "-") if key != "N" else "--N", value]
    return args


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, np.generic):
        return _jsonable(v.item())
    return v


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _blob_sha1(body: str) -> str:
    data = body.encode("utf-8")
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def render(cfg: ExperimentConfig, report: Report) -> str:
    embedded = _jsonable(cfg.embedded())
    if cfg.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(report.columns)
        for row in report.rows:
            writer.writerow([_cell(v) for v in row])
        body = buf.getvalue()
        head = [
            f"# sew {cfg.command}",
            f"# version={__version__}",
            "# config=" + json.dumps(embedded, sort_keys=True, separators=(",", ":")),
            f"# content_sha1={_blob_sha1(body)}",
        ]
        return "\n".join(head) + "\n" + body
    data = {
        "columns": report.columns,
        "rows": [[_jsonable(v.item() if isinstance(v, np.generic) else v) for v in row] for row in report.rows],
        **_jsonable(report.extra),
    }
    body = json.dumps(data, sort_keys=True, separators=(",", ":"))
    doc = {
        "command": cfg.command,
        "version": __version__,
        "config": embedded,
        "content_sha1": _blob_sha1(body),
        "data": data,
    }
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def run(cfg: ExperimentConfig) -> str:
    """Execute ``cfg.command`` and return the rendered report."""
    handler = COMMANDS[cfg.command][0]
    return render(cfg, handler(cfg))


def _resolve(ns: argparse.Namespace) -> ExperimentConfig:
    values = vars(ns).copy()
    command = values.pop("command")
    if values["seed"] is None:
        values["seed"] = int(os.environ.get("SEW_SEED", "0"))
    return ExperimentConfig(command, values)


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    ns = parser.parse_args(argv)
    if ns.config:
        try:
            extra = _config_args(ns.config)
        except (OSError, argparse.ArgumentTypeError) as exc:
            parser.error(f"--config: {exc}")
        ns = parser.parse_args(argv + extra)
    try:
        cfg = _resolve(ns)
    except ValueError:
        parser.error("SEW_SEED must be an integer")
    if cfg.threads < 1:
        parser.error("--threads must be positive")
    try:
        text = run(cfg)
    except HypothesisViolation as exc:
        print(f"sew {cfg.command}: hypothesis violated: {exc}", file=sys.stderr)
        return 2
    except SewError as exc:
        print(f"sew {cfg.command}: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"sew {cfg.command}: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        stamp = {"timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(), "threads": cfg.threads}
        with open(cfg.output + ".sidecar.json", "w", encoding="utf-8") as fh:
            json.dump(stamp, fh)
            fh.write("\n")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
