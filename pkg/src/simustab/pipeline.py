"""End-to-end orchestration: plants -> interpolation data -> CEE -> compensator -> sweep."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import cee, stabdata, synth
from .errors import AlphaInfeasible, ConfigError
from .fixtures import SIGMA_PRESETS

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCES = {
    "simplicity": stabdata.SIMPLICITY_TOL,
    "rank_gap": stabdata.RANK_GAP_TOL,
    "stability": synth.STABILITY_TOL,
    "cancel": synth.CANCEL_RESIDUAL_TOL,
}

STAGES = ("analyze", "solve", "sweep")


@dataclass
class PipelineResult:
    plants: stabdata.PlantPair
    pencil: Optional[stabdata.PencilM] = None
    zeros: list = field(default_factory=list)
    directions: list = field(default_factory=list)
    values: list = field(default_factory=list)
    mode: Optional[str] = None
    disc: Optional[stabdata.DiscData] = None
    normalized: Optional[stabdata.DiscData] = None
    sigma: Optional[np.ndarray] = None
    interpolant: Optional[cee.Interpolant] = None
    solution_report: Optional[cee.SolutionReport] = None
    F1: object = None
    delta: Optional[synth.DeltaPair] = None
    factors: Optional[synth.CompensatorFactors] = None
    sweep: Optional[synth.SweepReport] = None
    bezout: dict = field(default_factory=dict)
    axis: Optional[synth.AxisReport] = None
    timings: dict = field(default_factory=dict)


def resolve_sigma(sigma, n, ell):
    """Preset name, nested list or array -> ``n*ell x ell`` array (zeros if None)."""
    if sigma is None:
        return np.zeros((n * ell, ell))
    if isinstance(sigma, str):
        if sigma not in SIGMA_PRESETS:
            raise ConfigError("sigma", f"unknown preset {sigma!r}")
        sigma = SIGMA_PRESETS[sigma]
    try:
        S = np.array(sigma, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError("sigma", "must be a matrix of real numbers") from None
    if n * ell == 0 and S.size == 0:
        return np.zeros((0, ell))
    if S.shape != (n * ell, ell):
        raise ConfigError("sigma", f"expected shape {(n * ell, ell)} for n={n}, got {S.shape}")
    return S


def choose_mode(values, mode="auto"):
    """Direct interpolation when every value has positive Hermitian part, else square roots."""
    if mode != "auto":
        return mode
    for M in values:
        if np.linalg.eigvalsh(stabdata.hermitian_part(M)).min() <= 0:
            return "sqrt"
    return "direct"


def run_pipeline(plants, sigma=None, alpha=1.0, mode="auto", grid=None, stage="sweep",
                 tolerances=None, axis_check=True) -> PipelineResult:
    """Run the pipeline up to ``stage`` (``analyze``, ``solve`` or ``sweep``)."""
    if stage not in STAGES:
        raise ValueError(f"unknown stage {stage!r}")
    tol = dict(DEFAULT_TOLERANCES, **(tolerances or {}))
    res = PipelineResult(plants=plants)
    clock = time.perf_counter()

    res.pencil = stabdata.build_pencil(plants)
    res.zeros = stabdata.unstable_zeros(res.pencil, simplicity_tol=tol["simplicity"])
    for z in res.zeros:
        nd = stabdata.null_direction(res.pencil, z, rank_gap_tol=tol["rank_gap"])
        Mi, feasible = stabdata.interp_value(nd, alpha)
        if not feasible:
            raise AlphaInfeasible(
                f"alpha={alpha:g}: value at s={z.s:.6g} has an eigenvalue on the nonpositive real axis")
        res.directions.append(nd)
        res.values.append(Mi)
    res.mode = choose_mode(res.values, mode)
    data_values = res.values if res.mode == "direct" else [stabdata.principal_sqrt(M) for M in res.values]
    res.disc = stabdata.to_disc(res.zeros, data_values, res.mode, ell=plants.m)
    res.normalized = stabdata.prepare_data(res.disc)
    res.timings["analyze"] = time.perf_counter() - clock
    if stage == "analyze":
        return res

    dd = res.normalized
    cs = cee.build_structure(dd.ell, dd.n)
    res.sigma = resolve_sigma(sigma, dd.n, dd.ell)
    prob = cee.CEEProblem(cs, cee.build_data_operator(dd, cs), res.sigma)
    sol = cee.solve_cee(prob)
    res.interpolant = cee.Interpolant(sol, dd.normalization, res.mode)
    res.solution_report = cee.check_solution(res.interpolant, dd)
    res.timings["solve"] = time.perf_counter() - clock
    if stage == "solve":
        return res

    res.F1 = synth.f_plane(res.interpolant)
    res.delta = synth.delta_pair(res.F1, res.mode)
    res.factors = synth.compensator(res.pencil, res.delta, res.zeros, tol=tol["cancel"])
    res.sweep = synth.sweep(plants, res.delta, grid, stability_tol=tol["stability"])
    for lam in (0.0, 0.37, 1.0):
        res.bezout[lam] = synth.verify_bezout(plants, res.factors, res.delta, lam)
    if axis_check:
        omega = 10.0 * max((abs(z.s) for z in res.zeros), default=1.0)
        res.axis = synth.eigen_axis_check(res.delta, omega=omega)
    res.timings["sweep"] = time.perf_counter() - clock
    return res
