"""fpdist command line: theory curves, sampling, analysis, comparison.

Subcommands
  theory   exact/inverted Delta distribution for a model family
  sample   seeded Monte Carlo graph generation, written as an edge list
  analyze  per-node paradox statistics of an edge list
  compare  measured vs model-predicted Delta moments for an edge list

Every run writes a manifest.json into --out recording the arguments, input
digests, package versions, and wall time.  Exit codes: 0 success, 1 parameter
error, 2 input error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import tempfile
import time

import numpy as np

from . import __version__
from .degree import (DegreeDistribution, degree_histogram, fit_mean_var,
                     make_poisson, make_power_law_cutoff, to_csv)
from .density import (DEFAULT_BANDWIDTH, GridSpec, Kernel, delta_sign_masses,
                      gil_pelaez_tail, invert_with_kernel, smooth_atoms)
from .errors import (ConvergenceError, FpdistError, ParameterError,
                     ParseError, UnachievableTargetError)
from .gfp import AttributeModel, gfp_delta_transform
from .graph import (assortativity, load_edge_list, node_stats,
                    paradox_summary, remove_isolates)
from .maxent import gamma_for_r
from .poisson import (poisson_delta_moments, poisson_delta_pmf,
                      poisson_delta_sign_masses)
from .samplers import (sample_configuration, sample_degree_correlated,
                       sample_poisson_rg)
from .transform import (config_delta_transform, correlated_delta_transform,
                        mean_var_from_transform)

POISSON_ATOM_LAMBDA_MAX = 128.0


# ---------------------------------------------------------------------------
# plumbing

def _atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_via(path, write_fn):
    """Run write_fn(tmp_path) then rename into place."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    os.close(fd)
    try:
        write_fn(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return None if math.isnan(f) else f
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def _write_json(path, payload):
    _atomic_write(path, json.dumps(_jsonable(payload), indent=2) + "\n")


class _Run:
    """Collects output paths and writes the manifest at the end."""

    def __init__(self, args, subcommand):
        self.t0 = time.monotonic()
        self.outdir = args.out
        os.makedirs(self.outdir, exist_ok=True)
        self.subcommand = subcommand
        self.params = {k: v for k, v in vars(args).items()
                       if k not in ("func",) and not k.startswith("_")}
        self.inputs = {}
        self.outputs = []

    def path(self, name):
        p = os.path.join(self.outdir, name)
        self.outputs.append(name)
        return p

    def add_input(self, path):
        self.inputs[path] = _sha256(path)

    def finish(self):
        manifest = {
            "subcommand": self.subcommand,
            "argv": sys.argv[1:],
            "parameters": self.params,
            "inputs": self.inputs,
            "outputs": sorted(set(self.outputs)),
            "versions": {
                "fpdist": __version__,
                "numpy": np.__version__,
                "python": sys.version.split()[0],
            },
            "wall_time_s": round(time.monotonic() - self.t0, 3),
        }
        import scipy
        manifest["versions"]["scipy"] = scipy.__version__
        _write_json(os.path.join(self.outdir, "manifest.json"), manifest)


def _parse_grid(text) -> GridSpec:
    try:
        lo, hi, n = text.split(":")
        return GridSpec(float(lo), float(hi), int(n))
    except (ValueError, TypeError):
        raise ParameterError(f"--grid expects XMIN:XMAX:NPTS, got {text!r}")


def _kernel_from(args) -> Kernel:
    return Kernel(args.kernel, args.bandwidth)


def _grid_from(args, support) -> GridSpec:
    if args.grid:
        return _parse_grid(args.grid)
    lo, hi = support
    if not (hi > lo):
        lo, hi = lo - 1.0, hi + 1.0
    return GridSpec(lo, hi, 1024)


def _degree_dist(args) -> DegreeDistribution:
    """Shared config/maxent/gfp degree specification."""
    have_ab = args.alpha is not None or args.beta is not None
    have_mv = args.mean is not None or args.var is not None
    if have_ab == have_mv:
        raise ParameterError("give either --alpha and --beta, or --mean and --var")
    if have_ab:
        if args.alpha is None or args.beta is None:
            raise ParameterError("--alpha and --beta must be given together")
        return make_power_law_cutoff(args.alpha, args.beta, tail_tol=args.tail_tol)
    if args.mean is None or args.var is None:
        raise ParameterError("--mean and --var must be given together")
    alpha, beta = fit_mean_var(args.mean, args.var, tail_tol=args.tail_tol)
    return make_power_law_cutoff(alpha, beta, tail_tol=args.tail_tol)


# ---------------------------------------------------------------------------
# theory

def _density_outputs(run, F, kernel, grid, summary):
    dens = invert_with_kernel(F, kernel, grid)
    _atomic_via(run.path("density.csv"), dens.to_csv)
    summary["density_meta"] = dens.meta
    mean, var = mean_var_from_transform(F)
    summary["mean_delta"] = mean
    summary["var_delta"] = var
    if F.lattice is not None:
        pos, zer, neg = delta_sign_masses(F)
    else:
        pos, warn = gil_pelaez_tail(F, 0.0)
        zer, neg = 0.0, 1.0 - pos
        if warn:
            summary.setdefault("warnings", []).append(warn)
    summary["prob_delta_pos"] = pos
    summary["prob_delta_zero"] = zer
    summary["prob_delta_neg"] = neg
    return dens


def cmd_theory(args) -> int:
    run = _Run(args, "theory")
    kernel = _kernel_from(args)
    summary = {"model": args.model}

    if args.model == "poisson":
        lam = args.lam
        if lam is None:
            raise ParameterError("theory poisson requires --lambda")
        summary["lambda"] = lam
        pos, zer, neg = poisson_delta_sign_masses(lam)
        mean, var = poisson_delta_moments(lam)
        summary.update(prob_delta_pos=pos, prob_delta_zero=zer,
                       prob_delta_neg=neg, mean_delta=mean, var_delta=var)
        if lam <= POISSON_ATOM_LAMBDA_MAX:
            atoms = poisson_delta_pmf(lam, tail_tol=args.tail_tol)
            _atomic_via(run.path("atoms.csv"), atoms.to_csv)
            vals = atoms.values
            grid = _grid_from(args, (vals.min() - 1.0, vals.max() + 1.0))
            dens = smooth_atoms(vals, atoms.prob, kernel, grid)
            _atomic_via(run.path("density.csv"), dens.to_csv)
            summary["density_meta"] = dens.meta
            w = args.bin_width
            edges = np.arange(math.floor(vals.min() / w) * w,
                              vals.max() + w, w)
            mass, _ = np.histogram(vals, bins=edges, weights=atoms.prob)
            lines = ["bin_left,bin_right,mass"]
            lines += [f"{float(l)!r},{float(r)!r},{float(m)!r}"
                      for l, r, m in zip(edges[:-1], edges[1:], mass)]
            _atomic_write(run.path("binned_mass.csv"), "\n".join(lines) + "\n")
        else:
            # atom enumeration is impractical here; the zero-truncated
            # lattice carries the same law and inverts exactly
            F = config_delta_transform(make_poisson(lam, tail_tol=args.tail_tol))
            grid = _grid_from(args, F.support)
            dens = invert_with_kernel(F, kernel, grid)
            _atomic_via(run.path("density.csv"), dens.to_csv)
            summary["density_meta"] = dens.meta

    elif args.model in ("config", "maxent"):
        p = _degree_dist(args)
        _atomic_via(run.path("degree_pmf.csv"), lambda t: to_csv(p, t))
        if args.model == "maxent":
            if args.r is None:
                raise ParameterError("theory maxent requires --r")
            model = gamma_for_r(p, args.r)
            _atomic_write(run.path("model.json"), model.to_json() + "\n")
            summary.update(gamma=model.gamma, r=model.r)
            F = correlated_delta_transform(p, model.joint)
        else:
            F = config_delta_transform(p)
        grid = _grid_from(args, F.support)
        _density_outputs(run, F, kernel, grid, summary)

    elif args.model == "gfp":
        p = _degree_dist(args)
        attr = AttributeModel("gaussian_linear", a=args.attr_a, b=args.attr_b,
                              sigma=args.attr_sigma)
        joint = None
        if args.r is not None:
            model = gamma_for_r(p, args.r)
            _atomic_write(run.path("model.json"), model.to_json() + "\n")
            summary.update(gamma=model.gamma, r=model.r)
            joint = model.joint
        summary["attribute"] = {"a": attr.a, "b": attr.b, "sigma": attr.sigma}
        F = gfp_delta_transform(p, attr, joint)
        grid = _grid_from(args, F.support)
        _density_outputs(run, F, kernel, grid, summary)

    _write_json(run.path("summary.json"), summary)
    run.finish()
    return 0


# ---------------------------------------------------------------------------
# sample

def _write_edges(path, g):
    def writer(tmp):
        with open(tmp, "w") as fh:
            fh.write("# edge list: one 'u v' pair per line\n")
            for i in range(g.n):
                for j in g.neighbors(i):
                    if i < j:
                        fh.write(f"{g.labels[i]} {g.labels[j]}\n")
    _atomic_via(path, writer)


def cmd_sample(args) -> int:
    run = _Run(args, "sample")
    if args.model == "poisson":
        if args.lam is None or args.n is None:
            raise ParameterError("sample poisson requires --lambda and --n")
        g, meta = sample_poisson_rg(args.n, args.lam, args.seed)
    elif args.model == "config":
        p = _degree_dist(args)
        if args.n is None:
            raise ParameterError("sample config requires --n")
        g, meta = sample_configuration(p, args.n, args.seed)
    else:
        p = _degree_dist(args)
        if args.r is None or args.m_edges is None:
            raise ParameterError("sample maxent requires --r and --m-edges")
        model = gamma_for_r(p, args.r)
        g, meta = sample_degree_correlated(model.joint, args.m_edges, args.seed)
        meta["gamma"] = model.gamma
        meta["r_target"] = args.r
    _write_edges(run.path("edges.txt"), g)
    _write_json(run.path("sample_meta.json"), meta)
    run.finish()
    return 0


# ---------------------------------------------------------------------------
# analyze

def _load_attributes(path, g):
    x_by_label = {}
    with open(path) as fh:
        for i, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise ParseError("expected 'id,value'", line_no=i)
            try:
                x_by_label[parts[0]] = float(parts[1])
            except ValueError:
                if i == 1:
                    continue          # header row
                raise ParseError(f"bad attribute value {parts[1]!r}", line_no=i)
    try:
        return np.array([x_by_label[str(lab)] for lab in g.labels])
    except KeyError as exc:
        raise ParseError(f"attribute file missing node {exc}")


def cmd_analyze(args) -> int:
    run = _Run(args, "analyze")
    run.add_input(args.edges)
    g0 = load_edge_list(args.edges)
    g = remove_isolates(g0)
    if g.n == 0:
        raise ParseError("graph has no edges; nothing to analyze")
    x = None
    if args.attributes:
        run.add_input(args.attributes)
        x = _load_attributes(args.attributes, g)
    stats = node_stats(g, x)
    summ = paradox_summary(stats)
    r = assortativity(g)
    deg = g.degrees

    def writer(tmp):
        with open(tmp, "w") as fh:
            cols = "id,k,delta,kappa" + (",x,delta_x" if x is not None else "")
            fh.write(cols + "\n")
            for i in range(g.n):
                row = (f"{g.labels[i]},{deg[i]},"
                       f"{float(stats.delta[i])!r},{float(stats.kappa[i])!r}")
                if x is not None:
                    row += f",{float(stats.x[i])!r},{float(stats.delta_x[i])!r}"
                fh.write(row + "\n")
    _atomic_via(run.path("nodes.csv"), writer)

    summary = {
        "n": g.n,
        "m": g.m,
        "isolates_removed": g0.n - g.n,
        "mean_delta": summ.mean_delta,
        "var_delta": summ.var_delta,
        "frac_delta_pos": summ.frac_delta_pos,
        "frac_delta_zero": summ.frac_delta_zero,
        "frac_delta_neg": summ.frac_delta_neg,
        "mean_kappa": summ.mean_kappa,
        "assortativity": r,
        "assortativity_defined": bool(np.isfinite(r)),
        "cov_x_kappa": summ.cov_x_kappa,
        "mean_delta_x": summ.mean_delta_x,
        "identity_mean_kappa_pass": abs(summ.mean_kappa - 1.0) <= 1e-12,
        "identity_paradox_pass": summ.mean_delta >= -1e-12,
    }
    if x is not None:
        summary["identity_cov_pass"] = (
            abs(summ.mean_delta_x - summ.cov_x_kappa)
            <= 1e-12 * max(1.0, abs(summ.cov_x_kappa)))
    _write_json(run.path("summary.json"), summary)
    run.finish()
    return 0


# ---------------------------------------------------------------------------
# compare

def _transform_std(F):
    mean, var = mean_var_from_transform(F)
    return mean, math.sqrt(max(var, 0.0))


def cmd_compare(args) -> int:
    run = _Run(args, "compare")
    run.add_input(args.edges)
    g = remove_isolates(load_edge_list(args.edges))
    if g.m == 0:
        raise ParseError("graph has no edges; nothing to compare")
    stats = node_stats(g)
    summ = paradox_summary(stats)
    r_hat = assortativity(g)

    if args.fit_pk:
        deg = g.degrees.astype(float)
        alpha, beta = fit_mean_var(float(deg.mean()), float(deg.var()),
                                   tail_tol=args.tail_tol)
        p = make_power_law_cutoff(alpha, beta, tail_tol=args.tail_tol)
        p_source = {"kind": "fitted-power-law-cutoff", "alpha": alpha, "beta": beta}
    else:
        p = degree_histogram(g.degrees)
        p_source = {"kind": "empirical-histogram"}

    cfg_mean, cfg_std = _transform_std(config_delta_transform(p))
    result = {
        "n": g.n, "m": g.m,
        "r_measured": r_hat,
        "p_k": p_source,
        "measured": {"mean_delta": summ.mean_delta,
                     "std_delta": math.sqrt(summ.var_delta)},
        "config": {"mean_delta": cfg_mean, "std_delta": cfg_std},
    }
    if not np.isfinite(r_hat):
        result["maxent"] = dict(result["config"])
        result["maxent"]["warning"] = ("assortativity undefined; "
                                       "using configuration-model prediction")
    else:
        try:
            model = gamma_for_r(p, float(r_hat))
            me_mean, me_std = _transform_std(
                correlated_delta_transform(p, model.joint))
            result["maxent"] = {"gamma": model.gamma, "r": model.r,
                                "mean_delta": me_mean, "std_delta": me_std}
        except UnachievableTargetError as exc:
            result["maxent"] = dict(result["config"])
            result["maxent"]["warning"] = (
                f"target r unachievable ({exc}); "
                "using configuration-model prediction")
    _write_json(run.path("comparison.json"), result)
    run.finish()
    return 0


# ---------------------------------------------------------------------------
# parser / entry point

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParameterError(message)


def _add_common(sp, seed=False, density=False):
    sp.add_argument("--out", required=True, help="output directory")
    sp.add_argument("--tail-tol", type=float, default=1e-8,
                    help="distribution truncation budget")
    if seed:
        sp.add_argument("--seed", type=int, default=0)
    if density:
        sp.add_argument("--kernel", choices=("laplace", "rect"),
                        default="laplace")
        sp.add_argument("--bandwidth", type=float, default=DEFAULT_BANDWIDTH)
        sp.add_argument("--grid", default=None, metavar="XMIN:XMAX:NPTS")


def _add_degree_args(sp):
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--beta", type=float, default=None)
    sp.add_argument("--mean", type=float, default=None)
    sp.add_argument("--var", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="fpdist", description=__doc__,
                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    th = sub.add_parser("theory", help="exact model distributions")
    thm = th.add_subparsers(dest="model", required=True)
    t_po = thm.add_parser("poisson")
    t_po.add_argument("--lambda", dest="lam", type=float, required=True)
    t_po.add_argument("--bin-width", type=float, default=1.0)
    _add_common(t_po, density=True)
    for name in ("config", "maxent", "gfp"):
        t = thm.add_parser(name)
        _add_degree_args(t)
        if name in ("maxent", "gfp"):
            t.add_argument("--r", type=float, default=None)
        if name == "gfp":
            t.add_argument("--attr-a", type=float, default=0.0)
            t.add_argument("--attr-b", type=float, default=1.0)
            t.add_argument("--attr-sigma", type=float, default=1.0)
        _add_common(t, density=True)

    sa = sub.add_parser("sample", help="seeded graph samplers")
    sam = sa.add_subparsers(dest="model", required=True)
    s_po = sam.add_parser("poisson")
    s_po.add_argument("--lambda", dest="lam", type=float, required=True)
    s_po.add_argument("--n", type=int, required=True)
    _add_common(s_po, seed=True)
    s_cf = sam.add_parser("config")
    _add_degree_args(s_cf)
    s_cf.add_argument("--n", type=int, required=True)
    _add_common(s_cf, seed=True)
    s_me = sam.add_parser("maxent")
    _add_degree_args(s_me)
    s_me.add_argument("--r", type=float, required=True)
    s_me.add_argument("--m-edges", type=int, required=True)
    _add_common(s_me, seed=True)

    an = sub.add_parser("analyze", help="per-node statistics of an edge list")
    an.add_argument("--edges", required=True)
    an.add_argument("--attributes", default=None)
    _add_common(an)

    co = sub.add_parser("compare", help="measured vs predicted Delta moments")
    co.add_argument("--edges", required=True)
    co.add_argument("--fit-pk", action="store_true",
                    help="use a fitted truncated power law instead of the "
                         "empirical degree histogram")
    _add_common(co)

    return ap


_DISPATCH = {"theory": cmd_theory, "sample": cmd_sample,
             "analyze": cmd_analyze, "compare": cmd_compare}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return _DISPATCH[args.command](args)
    except ParameterError as exc:
        print(f"fpdist: parameter error: {exc}", file=sys.stderr)
        return 1
    except (ParseError, OSError) as exc:
        print(f"fpdist: input error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"fpdist: failed to converge: {exc}", file=sys.stderr)
        return 3
    except FpdistError as exc:
        print(f"fpdist: input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
