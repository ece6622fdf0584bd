"""Monte Carlo orchestration: seeded path ensembles, statistics, persistence.

Paths are simulated in batches (chunks) of a configurable size; every path owns
a counter-based noise substream keyed by its global index, so results do not
depend on how paths are grouped into chunks. Observables are recorded on a
time stride, reduced by streaming moments, and written as `summary.csv`,
`theory.csv` (closed-form curves), `manifest.json`, and optionally one CSV per
path. Paths that fail (blow-up, frame collapse, singular projection) are
excluded from the statistics and reported; the run aborts if more than
EXCLUSION_CAP of the ensemble is lost.
"""

import dataclasses
import json
import subprocess
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .approx import ApproxSimulator, theory_curves
from .direct import DirectStepper
from .exceptions import DomainError
from .frozen import FAIL_NAMES, FrozenStepper
from .grid import SpatialGrid
from .noise import RNG_ALGORITHM, NoiseSpec, make_generator, sample_block
from .soliton import SolitonContext, soliton_profile
from .stats import StreamingMoments

NOISE_BLOCK = 16       # steps pre-generated per path at a time
EXCLUSION_CAP = 0.01   # abort when more than this fraction of paths fails

MODES = ("direct", "frozen", "approx", "ensemble")


@dataclass
class RunConfig:
    mode: str = "frozen"
    example: str = "scalar"
    sigma: float = 0.1
    c_star: float = 1.0
    L: float = 40.0
    N: int = 512
    dt: float = 1e-3
    t_end: float = 1.0
    paths: int = 100
    seed: int = 0
    record_stride: int = 10
    weight_a: float = 0.15
    norm_window: tuple = None
    output_dir: str = None
    store_paths: bool = False
    chunk_size: int = 1000
    correlation_len: float = None
    max_order: int = 2
    with_omega2: bool = False

    def validate(self):
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.example not in ("scalar", "white"):
            raise DomainError(f"example must be scalar or white, got {self.example!r}")
        for name in ("sigma",):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be nonnegative")
        for name in ("c_star", "L", "dt", "t_end"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be positive")
        if self.paths < 1 or self.record_stride < 1 or self.chunk_size < 1:
            raise DomainError("paths, record_stride and chunk_size must be >= 1")
        return self

    @property
    def nsteps(self):
        return int(round(self.t_end / self.dt))

    def noise_kind(self):
        if self.mode == "direct" and self.correlation_len:
            return "colored"
        return "scalar" if self.example == "scalar" else "white"


@dataclass
class EnsembleSummary:
    times: np.ndarray
    observables: dict      # name -> {"mean","var","se","se_var","n"}
    excluded: int
    failure_counts: dict
    clamps: int
    manifest: dict


def _record_steps(nsteps, stride):
    steps = list(range(0, nsteps + 1, stride))
    if steps[-1] != nsteps:
        steps.append(nsteps)
    return steps


def _noise_blocks(cfg, grid, path_ids):
    """Yield stacked increment blocks (b, B[, M]) covering all steps."""
    kind = cfg.noise_kind()
    spec = NoiseSpec(
        kind=kind, seed=cfg.seed, correlation_len=cfg.correlation_len
    )
    gens = [make_generator(spec, stream_id=pid) for pid in path_ids]
    done = 0
    nsteps = cfg.nsteps
    while done < nsteps:
        b = min(NOISE_BLOCK, nsteps - done)
        rows = np.stack(
            [sample_block(spec, grid, cfg.dt, b, g) for g in gens], axis=1
        )
        yield rows
        done += b


def _build_context(cfg):
    grid = SpatialGrid(L=cfg.L, N=cfg.N)
    window = cfg.norm_window
    return SolitonContext(
        grid=grid, c_star=cfg.c_star, weight_a=cfg.weight_a, norm_window=window
    )


# ---------------------------------------------------------------------------
# chunk simulators: return (times, {name: (T, B)}, failure_codes, clamps)

def _chunk_direct(cfg, grid, path_ids):
    stepper = DirectStepper(grid, cfg.sigma, cfg.noise_kind(), cfg.dt)
    u0 = soliton_profile(cfg.c_star, grid.x)
    state = stepper.initial_state(u0, npaths=len(path_ids))
    rec = _record_steps(cfg.nsteps, cfg.record_stride)
    times, series = [], {"energy": [], "norm": []}

    def record():
        e = stepper.energy(state)
        times.append(state.t)
        series["energy"].append(e)
        series["norm"].append(np.sqrt(e))

    record()
    nxt = 1
    for block in _noise_blocks(cfg, grid, path_ids):
        for row in block:
            stepper.step(state, row)
            if nxt < len(rec) and state.step_index == rec[nxt]:
                record()
                nxt += 1
    out = {k: np.array(v) for k, v in series.items()}
    return np.array(times), out, state.blown.astype(int), np.zeros(len(path_ids), int)


def _chunk_frozen(cfg, ctx, path_ids, with_approx):
    bsize = len(path_ids)
    stepper = FrozenStepper(ctx, cfg.sigma, cfg.example, cfg.dt)
    state = stepper.initial_state(bsize)
    approx = None
    if with_approx:
        approx = ApproxSimulator(
            ctx,
            cfg.sigma,
            cfg.example,
            cfg.dt,
            max_order=cfg.max_order,
            with_omega2=cfg.with_omega2,
        )
        astate = approx.initial_state(bsize)

    rec = _record_steps(cfg.nsteps, cfg.record_stride)
    names = ["c", "alpha", "omega", "vnorm", "sup_vnorm"]
    if with_approx:
        for k in range(cfg.max_order + 1):
            names += [f"c{k}", f"alpha{k}"]
        names += ["omega0", "c_dev0"]
        if approx.with_omega2:
            names += ["omega2"]
        if cfg.max_order >= 2:
            names += ["c_err2", "sup_c_err2", "c_dev2"]
        if cfg.max_order >= 1:
            names += ["v_err1", "sup_v_err1"]
    times, series = [], {n: [] for n in names}
    sup_vnorm = np.zeros(bsize)
    sup_cerr = np.zeros(bsize)
    sup_verr = np.zeros(bsize)

    def update_sups():
        nonlocal sup_vnorm, sup_cerr, sup_verr
        vn = ctx.weighted_norm(state.v)
        sup_vnorm = np.maximum(sup_vnorm, vn)
        if with_approx and cfg.max_order >= 2:
            cerr = np.abs(stepper.speed(state) - astate.speed(2, cfg.c_star))
            sup_cerr = np.maximum(sup_cerr, cerr)
        if with_approx and cfg.max_order >= 1:
            verr = ctx.weighted_norm(state.v - approx.v_k(astate, 1))
            sup_verr = np.maximum(sup_verr, verr)
        return vn

    def record():
        vn = update_sups()
        times.append(state.t)
        series["c"].append(stepper.speed(state))
        series["alpha"].append(state.alpha.copy())
        series["omega"].append(stepper.omega(state))
        series["vnorm"].append(vn)
        series["sup_vnorm"].append(sup_vnorm.copy())
        if with_approx:
            for k in range(cfg.max_order + 1):
                series[f"alpha{k}"].append(astate.alpha[k].copy())
                series[f"c{k}"].append(astate.speed(k, cfg.c_star))
            series["omega0"].append(astate.omega[0].copy())
            # signed deviations share the driving noise with c, so their
            # standard errors are far smaller than the marginal ones
            series["c_dev0"].append(
                stepper.speed(state) - astate.speed(0, cfg.c_star)
            )
            if approx.with_omega2:
                series["omega2"].append(astate.omega[2].copy())
            if cfg.max_order >= 2:
                series["c_err2"].append(
                    np.abs(stepper.speed(state) - astate.speed(2, cfg.c_star))
                )
                series["sup_c_err2"].append(sup_cerr.copy())
                series["c_dev2"].append(
                    stepper.speed(state) - astate.speed(2, cfg.c_star)
                )
            if cfg.max_order >= 1:
                series["v_err1"].append(
                    ctx.weighted_norm(state.v - approx.v_k(astate, 1))
                )
                series["sup_v_err1"].append(sup_verr.copy())

    record()
    nxt = 1
    for block in _noise_blocks(cfg, ctx.grid, path_ids):
        for row in block:
            stepper.step(state, row)
            if with_approx:
                approx.step(astate, state.last_dwt)
            update_sups()
            if nxt < len(rec) and state.step_index == rec[nxt]:
                record()
                nxt += 1

    failure = state.failure.copy()
    clamps = np.zeros(bsize, dtype=int)
    if with_approx:
        failure = np.where(failure != 0, failure, astate.failure)
        clamps = sum(astate.clamps.values())
    out = {k: np.array(v) for k, v in series.items()}
    return np.array(times), out, failure, clamps


def _chunk_approx(cfg, ctx, path_ids):
    bsize = len(path_ids)
    approx = ApproxSimulator(
        ctx,
        cfg.sigma,
        cfg.example,
        cfg.dt,
        max_order=cfg.max_order,
        with_omega2=cfg.with_omega2,
    )
    astate = approx.initial_state(bsize)
    rec = _record_steps(cfg.nsteps, cfg.record_stride)
    names = []
    for k in range(cfg.max_order + 1):
        names += [f"c{k}", f"alpha{k}"]
    names += ["omega0"] + (["omega2"] if approx.with_omega2 else [])
    times, series = [], {n: [] for n in names}

    def record():
        times.append(astate.t)
        for k in range(cfg.max_order + 1):
            series[f"alpha{k}"].append(astate.alpha[k].copy())
            series[f"c{k}"].append(astate.speed(k, cfg.c_star))
        series["omega0"].append(astate.omega[0].copy())
        if approx.with_omega2:
            series["omega2"].append(astate.omega[2].copy())

    record()
    nxt = 1
    for block in _noise_blocks(cfg, ctx.grid, path_ids):
        for row in block:
            approx.step(astate, row)
            if nxt < len(rec) and astate.step_index == rec[nxt]:
                record()
                nxt += 1
    out = {k: np.array(v) for k, v in series.items()}
    return np.array(times), out, astate.failure.copy(), sum(astate.clamps.values())


# ---------------------------------------------------------------------------

def run_ensemble(cfg):
    cfg.validate()
    t_wall = time.time()
    grid = SpatialGrid(L=cfg.L, N=cfg.N)
    ctx = None if cfg.mode == "direct" else _build_context(cfg)

    moments = {}
    times = None
    failure_counts = {}
    clamp_total = 0
    excluded_ids = []
    path_rows = {}  # path id -> (times, {name: series}) when store_paths

    for start in range(0, cfg.paths, cfg.chunk_size):
        ids = list(range(start, min(start + cfg.chunk_size, cfg.paths)))
        if cfg.mode == "direct":
            t, series, failure, clamps = _chunk_direct(cfg, grid, ids)
        elif cfg.mode == "approx":
            t, series, failure, clamps = _chunk_approx(cfg, ctx, ids)
        else:
            t, series, failure, clamps = _chunk_frozen(
                cfg, ctx, ids, with_approx=(cfg.mode == "ensemble")
            )
        times = t
        ok = failure == 0
        for name, mat in series.items():
            acc = moments.setdefault(name, StreamingMoments((len(t),)))
            acc.add(mat[:, ok].T)
        for pid, code in zip(ids, failure):
            if code != 0:
                excluded_ids.append(pid)
                key = FAIL_NAMES.get(int(code), str(code))
                failure_counts[key] = failure_counts.get(key, 0) + 1
        clamp_total += int(np.sum(clamps))
        if cfg.store_paths:
            for j, pid in enumerate(ids):
                if failure[j] == 0:
                    path_rows[pid] = (t, {n: m[:, j] for n, m in series.items()})

    excluded = len(excluded_ids)
    if excluded > EXCLUSION_CAP * cfg.paths:
        raise RuntimeError(
            f"{excluded} of {cfg.paths} paths excluded "
            f"(cap {EXCLUSION_CAP:.0%}): {failure_counts}"
        )

    observables = {
        name: {
            "mean": acc.mean,
            "var": acc.variance,
            "se": acc.se_mean,
            "se_var": acc.se_variance,
            "n": acc.n,
        }
        for name, acc in moments.items()
    }
    manifest = {
        "config": {
            k: (list(v) if isinstance(v, tuple) else v)
            for k, v in dataclasses.asdict(cfg).items()
        },
        "rng": RNG_ALGORITHM,
        "build_id": _build_id(),
        "paths": cfg.paths,
        "excluded_paths": excluded_ids,
        "failure_counts": failure_counts,
        "alpha_clamps": clamp_total,
        "wall_time_s": round(time.time() - t_wall, 3),
    }
    summary = EnsembleSummary(
        times=times,
        observables=observables,
        excluded=excluded,
        failure_counts=failure_counts,
        clamps=clamp_total,
        manifest=manifest,
    )
    if cfg.output_dir:
        _write_outputs(cfg, summary, path_rows)
    return summary


def pathwise_correspondence(cfg):
    """Same-noise direct vs frozen comparison in the scalar regime.

    Both solvers consume identical Brownian increments path by path. The
    direct fields are reduced to (c, xi) by the orthogonality fit, and the
    phase shift is accumulated from the fitted speed, mirroring how the frozen
    solver accumulates its own. Returns a dict of (T,) / (T, B) arrays.
    """
    from .phasefit import fit_phase, phase_shift

    cfg.validate()
    grid = SpatialGrid(L=cfg.L, N=cfg.N)
    ctx = _build_context(cfg)
    direct = DirectStepper(grid, cfg.sigma, "scalar", cfg.dt)
    frozen = FrozenStepper(ctx, cfg.sigma, "scalar", cfg.dt)
    dstate = direct.initial_state(soliton_profile(cfg.c_star, grid.x), cfg.paths)
    fstate = frozen.initial_state(cfg.paths)

    rec = _record_steps(cfg.nsteps, cfg.record_stride)
    guesses = [(cfg.c_star, None)] * cfg.paths
    times, c_fit, xi_fit, c_frozen, omega_frozen = [], [], [], [], []

    def record():
        row_c, row_xi = [], []
        for j in range(cfg.paths):
            fit = fit_phase(grid, dstate.u[j], guesses[j][0], guesses[j][1])
            guesses[j] = (fit.c, fit.xi)
            row_c.append(fit.c)
            row_xi.append(fit.xi)
        times.append(dstate.t)
        c_fit.append(row_c)
        xi_fit.append(row_xi)
        c_frozen.append(frozen.speed(fstate))
        omega_frozen.append(frozen.omega(fstate))

    record()
    nxt = 1
    for block in _noise_blocks(cfg, grid, range(cfg.paths)):
        for row in block:
            direct.step(dstate, row)
            frozen.step(fstate, row)
            if nxt < len(rec) and dstate.step_index == rec[nxt]:
                record()
                nxt += 1

    times = np.array(times)
    c_fit = np.array(c_fit)
    xi_fit = np.array(xi_fit)
    omega_fit = np.stack(
        [phase_shift(times, c_fit[:, j], xi_fit[:, j]) for j in range(cfg.paths)],
        axis=1,
    )
    return {
        "t": times,
        "c_direct": c_fit,
        "xi_direct": xi_fit,
        "omega_direct": omega_fit,
        "c_frozen": np.array(c_frozen),
        "omega_frozen": np.array(omega_frozen),
        "frozen_failure": fstate.failure.copy(),
        "direct_blown": dstate.blown.copy(),
    }


def _build_id():
    try:
        out = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            capture_output=True,
            text=True,
            timeout=5,
            cwd=Path(__file__).resolve().parent,
        )
        if out.returncode == 0:
            return out.stdout.strip()
    except Exception:
        pass
    return "unknown"


def _write_outputs(cfg, summary, path_rows):
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    lines = ["t,observable,mean,var,se,n"]
    for name in sorted(summary.observables):
        rec = summary.observables[name]
        for i, t in enumerate(summary.times):
            lines.append(
                f"{float(t)!r},{name},{float(rec['mean'][i])!r},"
                f"{float(rec['var'][i])!r},{float(rec['se'][i])!r},{rec['n']}"
            )
    (out / "summary.csv").write_text("\n".join(lines) + "\n")

    if cfg.mode != "direct":
        ctx = _build_context(cfg)
        curves = theory_curves(ctx, cfg.example, cfg.sigma, summary.times)
    else:
        grid_norm2 = 6.0 * cfg.c_star**1.5
        curves = {
            "t": summary.times,
            "mean_energy": grid_norm2 * np.exp(cfg.sigma**2 * summary.times),
            "mean_norm": np.full_like(summary.times, np.sqrt(grid_norm2)),
        }
    tl = ["t,statistic,value"]
    for name, vals in curves.items():
        if name == "t":
            continue
        for t, v in zip(curves["t"], vals):
            tl.append(f"{float(t)!r},{name},{float(v)!r}")
    (out / "theory.csv").write_text("\n".join(tl) + "\n")

    (out / "manifest.json").write_text(json.dumps(summary.manifest, indent=2) + "\n")

    if path_rows:
        pdir = out / "paths"
        pdir.mkdir(exist_ok=True)
        for pid, (t, series) in path_rows.items():
            names = sorted(series)
            lines = ["t," + ",".join(names)]
            for i, ti in enumerate(t):
                lines.append(
                    f"{float(ti)!r},"
                    + ",".join(repr(float(series[n][i])) for n in names)
                )
            (pdir / f"{pid:05d}.csv").write_text("\n".join(lines) + "\n")
