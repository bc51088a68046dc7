"""Truncated-Fock-space brute force for validating the Gaussian track.

Everything here is deliberately independent of the covariance-matrix
machinery: unitaries come from exponentiating quadratic generators on the
truncated number basis, loss is the k-photon amplitude-damping Kraus sum, and
photon moments are read off the density-matrix diagonal. Agreement between
this track and gaussian_core is what certifies the moment formulas.

Truncation policy: never renormalize. Probability parked above the cutoff is
reported as tail_mass = |1 - trace| plus the population of the top two levels
of any mode (two levels so parity-even states cannot hide a growing tail),
and any tail at or past the gate aborts with a suggested larger cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from . import gaussian_core as gc
from . import sagnac_model as sm
from .errors import CutoffTooSmallError, ResourceLimitError
from .sagnac_model import LoopLossSpec, Scenario, plan_pipeline
from .tolerances import TAIL_MASS_GATE

DEFAULT_MAX_DIM = 4096
CUTOFF_LADDER = (16, 24, 36, 48, 64, 96, 128, 176)

_TWO_MODE_CHANNELS = ("beamsplitter", "two_mode_squeezer")
_CHANNELS = ("phase", "beamsplitter", "single_squeezer", "two_mode_squeezer", "loss")


@dataclass(frozen=True, eq=False)
class FockDensityMatrix:
    """Density matrix over the product number basis, mode 0 slowest index."""

    num_modes: int
    cutoff: int
    rho: np.ndarray

    def __post_init__(self):
        if self.num_modes < 1 or self.cutoff < 2:
            raise ValueError("need num_modes >= 1 and cutoff >= 2")
        d = self.cutoff**self.num_modes
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (d, d):
            raise ValueError(f"rho must be {d}x{d} for this mode count and cutoff")
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self) -> int:
        return self.cutoff**self.num_modes


@dataclass(frozen=True)
class DiscrepancyReport:
    """Moment comparison between the Gaussian and Fock tracks."""

    mean_n_gauss: float
    mean_n_fock: float
    var_n_gauss: float
    var_n_fock: float
    abs_error_mean: float
    abs_error_var: float
    tail_mass: float

    def rel_error_mean(self, floor: float = 1e-12) -> float:
        return self.abs_error_mean / max(abs(self.mean_n_fock), floor)

    def rel_error_var(self, floor: float = 1e-12) -> float:
        return self.abs_error_var / max(abs(self.var_n_fock), floor)


@dataclass(frozen=True)
class ChannelCase:
    name: str
    channel: str
    params: dict
    input_spec: tuple
    cutoff: int


@dataclass(frozen=True)
class PipelineCase:
    name: str
    scenario: Scenario
    phi: float
    cutoff: int


def _annihilation(cutoff: int) -> np.ndarray:
    a = np.zeros((cutoff, cutoff))
    n = np.arange(1, cutoff)
    a[n - 1, n] = np.sqrt(n)
    return a


@lru_cache(maxsize=None)
def _phase_unitary(cutoff: int, theta: float) -> np.ndarray:
    return np.diag(np.exp(1j * theta * np.arange(cutoff)))


@lru_cache(maxsize=None)
def _single_squeeze_unitary(cutoff: int, g: float, pump_phase: float) -> np.ndarray:
    a = _annihilation(cutoff)
    adag = a.T
    gen = 0.5 * g * (np.exp(1j * pump_phase) * adag @ adag - np.exp(-1j * pump_phase) * a @ a)
    return expm(gen)


@lru_cache(maxsize=None)
def _bs_blocks(cutoff: int):
    """Balanced-splitter unitary, block per conserved total photon number.

    Returns (flat pair indices, block) tuples covering the full pair basis,
    pair index = n_a * cutoff + n_b.
    """
    c = cutoff
    blocks = []
    for total in range(2 * c - 1):
        lo = max(0, total - (c - 1))
        hi = min(total, c - 1)
        na = np.arange(lo, hi + 1)
        idx = na * c + (total - na)
        k = np.zeros((len(na), len(na)))
        for i in range(len(na) - 1):
            # <na+1, nb-1| a^dag b |na, nb>
            k[i + 1, i] = math.sqrt((na[i] + 1) * (total - na[i]))
        gen = k - k.T
        blocks.append((idx, expm((math.pi / 4.0) * gen)))
    return tuple(blocks)


@lru_cache(maxsize=None)
def _tms_blocks(cutoff: int, g: float, pump_phase: float):
    """Two-mode squeezer, block per conserved occupation difference."""
    c = cutoff
    phase = np.exp(1j * pump_phase)
    blocks = []
    for delta in range(-(c - 1), c):
        na = np.arange(max(delta, 0), c + min(delta, 0))
        nb = na - delta
        idx = na * c + nb
        k = np.zeros((len(na), len(na)), dtype=complex)
        for i in range(len(na) - 1):
            amp = g * math.sqrt((na[i] + 1) * (nb[i] + 1))
            k[i + 1, i] = phase * amp
            k[i, i + 1] = -np.conj(phase) * amp
        blocks.append((idx, expm(k)))
    return tuple(blocks)


@lru_cache(maxsize=None)
def _loss_kraus(cutoff: int, eta: float):
    """Amplitude damping: A_k drops exactly k photons; trace-preserving."""
    c = cutoff
    ops = []
    for k in range(c):
        a_k = np.zeros((c, c))
        for n in range(k, c):
            a_k[n - k, n] = math.sqrt(math.comb(n, k) * (1.0 - eta) ** k * eta ** (n - k))
        if np.any(a_k):
            ops.append(a_k)
    return tuple(ops)


@lru_cache(maxsize=None)
def _occupations(num_modes: int, cutoff: int) -> np.ndarray:
    """(num_modes, dim) occupation numbers per flat basis index."""
    d = cutoff**num_modes
    idx = np.arange(d)
    occ = np.empty((num_modes, d))
    for m in reversed(range(num_modes)):
        occ[m] = idx % cutoff
        idx = idx // cutoff
    return occ


@lru_cache(maxsize=None)
def _boundary_mask(num_modes: int, cutoff: int) -> np.ndarray:
    occ = _occupations(num_modes, cutoff)
    return np.any(occ >= cutoff - 2, axis=0)


def tail_mass(state: FockDensityMatrix) -> float:
    p = np.real(np.diag(state.rho))
    deficit = abs(1.0 - float(np.sum(p)))
    boundary = float(np.sum(p[_boundary_mask(state.num_modes, state.cutoff)]))
    return deficit + max(boundary, 0.0)


def fock_moments(state: FockDensityMatrix, modes) -> tuple[float, float]:
    """(mean, variance) of the total photon number over the given modes."""
    modes = tuple(modes)
    occ = _occupations(state.num_modes, state.cutoff)
    n_sel = occ[list(modes)].sum(axis=0)
    p = np.real(np.diag(state.rho))
    mean = float(p @ n_sel)
    var = float(p @ n_sel**2) - mean**2
    return mean, var


def _coherent_vector(cutoff: int, alpha: complex) -> np.ndarray:
    v = np.zeros(cutoff, dtype=complex)
    v[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, cutoff):
        v[n] = v[n - 1] * alpha / math.sqrt(n)
    return v


def _squeezed_vector(cutoff: int, g0: float, pump_phase: float = 0.0) -> np.ndarray:
    return _single_squeeze_unitary(cutoff, g0, pump_phase)[:, 0]


def fock_product_state(vectors) -> FockDensityMatrix:
    """Density matrix of a product of per-mode pure states."""
    vecs = [np.asarray(v, dtype=complex) for v in vectors]
    cutoff = len(vecs[0])
    if any(len(v) != cutoff for v in vecs):
        raise ValueError("all mode vectors must share one cutoff")
    psi = vecs[0]
    for v in vecs[1:]:
        psi = np.kron(psi, v)
    return FockDensityMatrix(num_modes=len(vecs), cutoff=cutoff, rho=np.outer(psi, psi.conj()))


def fock_vacuum(num_modes: int, cutoff: int) -> FockDensityMatrix:
    e0 = np.zeros(cutoff, dtype=complex)
    e0[0] = 1.0
    return fock_product_state([e0] * num_modes)


def _apply_loss_banded(rho_t: np.ndarray, eta: float, mode: int, num_modes: int) -> np.ndarray:
    """Damping operator sum exploiting that A_k has a single diagonal band.

    rho'[i, j] = sum_k b_k[i] rho[i+k, j+k] b_k[j] with
    b_k[i] = sqrt(C(i+k, k) (1-eta)^k eta^i), so each k-photon term is a
    shifted diagonal slice scaled by an outer product.  Equivalent to the
    explicit Kraus sum but without dense matrix products.
    """
    c = rho_t.shape[mode]
    t = np.moveaxis(rho_t, (mode, num_modes + mode), (0, 1))
    out = np.zeros(t.shape, dtype=t.dtype)
    pad = (1,) * (t.ndim - 2)
    for k in range(c):
        if k > 0 and eta == 1.0:
            break
        b = np.sqrt(
            np.array([math.comb(i + k, k) * (1.0 - eta) ** k * eta**i for i in range(c - k)])
        )
        w = (b[:, None] * b[None, :]).reshape((c - k, c - k) + pad)
        out[: c - k, : c - k] += w * t[k:, k:]
    return np.moveaxis(out, (0, 1), (mode, num_modes + mode))


def _sandwich_single(rho_t: np.ndarray, op: np.ndarray, mode: int, num_modes: int) -> np.ndarray:
    t = np.tensordot(op, rho_t, axes=([1], [mode]))
    t = np.moveaxis(t, 0, mode)
    t = np.tensordot(op.conj(), t, axes=([1], [num_modes + mode]))
    return np.moveaxis(t, 0, num_modes + mode)


def _sandwich_pair_blocks(
    rho: np.ndarray, blocks, mode_a: int, mode_b: int, num_modes: int, cutoff: int
) -> np.ndarray:
    c, m_count = cutoff, num_modes
    t = rho.reshape([c] * (2 * m_count))
    front = (mode_a, mode_b, m_count + mode_a, m_count + mode_b)
    order = list(front) + [ax for ax in range(2 * m_count) if ax not in front]
    t = np.transpose(t, order)
    rest = t.shape[4:]
    p = c * c
    r = int(np.prod(rest)) if rest else 1
    mat = np.ascontiguousarray(t).reshape(p, p, r)
    tmp = np.zeros_like(mat)
    for idx, block in blocks:
        tmp[idx] = np.tensordot(block, mat[idx], axes=([1], [0]))
    out = np.zeros_like(mat)
    for idx, block in blocks:
        seg = np.tensordot(block.conj(), tmp[:, idx, :], axes=([1], [1]))
        out[:, idx, :] = np.moveaxis(seg, 0, 1)
    t = out.reshape([c, c, c, c] + list(rest))
    t = np.transpose(t, np.argsort(order))
    d = c**m_count
    return np.ascontiguousarray(t).reshape(d, d)


def _suggest(cutoff: int) -> int:
    return math.ceil(1.5 * cutoff) + 2


def fock_apply_channel(state: FockDensityMatrix, channel: str, params: dict) -> FockDensityMatrix:
    """Apply one channel exactly on the truncated space; gate the tail."""
    c, m_count = state.cutoff, state.num_modes
    if channel == "phase":
        u = _phase_unitary(c, float(params["theta"]))
        t = _sandwich_single(state.rho.reshape([c] * (2 * m_count)), u, params["mode"], m_count)
    elif channel == "single_squeezer":
        u = _single_squeeze_unitary(c, float(params["g"]), float(params.get("pump_phase", 0.0)))
        t = _sandwich_single(state.rho.reshape([c] * (2 * m_count)), u, params["mode"], m_count)
    elif channel == "loss":
        eta = float(params["eta"])
        if not 0.0 <= eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {eta}")
        rho_t = state.rho.reshape([c] * (2 * m_count))
        t = _apply_loss_banded(rho_t, eta, params["mode"], m_count)
    elif channel == "beamsplitter":
        t = _sandwich_pair_blocks(
            state.rho, _bs_blocks(c), params["mode_a"], params["mode_b"], m_count, c
        )
    elif channel == "two_mode_squeezer":
        t = _sandwich_pair_blocks(
            state.rho,
            _tms_blocks(c, float(params["g"]), float(params.get("pump_phase", 0.0))),
            params["mode_a"],
            params["mode_b"],
            m_count,
            c,
        )
    else:
        raise ValueError(f"unknown channel {channel!r}; expected one of {_CHANNELS}")
    d = c**m_count
    rho = t.reshape(d, d)
    rho = 0.5 * (rho + rho.conj().T)
    out = FockDensityMatrix(num_modes=m_count, cutoff=c, rho=rho)
    tm = tail_mass(out)
    if tm >= TAIL_MASS_GATE:
        raise CutoffTooSmallError(
            f"tail mass {tm:.3e} at cutoff {c} for channel {channel}; "
            f"retry with cutoff >= {_suggest(c)}",
            suggested_cutoff=_suggest(c),
        )
    return out


def _gate_input(state: FockDensityMatrix) -> FockDensityMatrix:
    tm = tail_mass(state)
    if tm >= TAIL_MASS_GATE:
        raise CutoffTooSmallError(
            f"input state tail mass {tm:.3e} at cutoff {state.cutoff}; "
            f"retry with cutoff >= {_suggest(state.cutoff)}",
            suggested_cutoff=_suggest(state.cutoff),
        )
    return state


def _check_input_spec(input_spec: tuple) -> tuple:
    if not input_spec or input_spec[0] not in ("vacuum", "coherent", "squeezed"):
        raise ValueError(f"input_spec must start with vacuum|coherent|squeezed, got {input_spec!r}")
    kind = input_spec[0]
    if kind == "vacuum":
        return ("vacuum",)
    if len(input_spec) != 2:
        raise ValueError(f"{kind} input takes exactly one parameter")
    if kind == "coherent":
        alpha = complex(input_spec[1])
        if abs(alpha) ** 2 > 2.0:
            raise ValueError(f"coherent input limited to |alpha|^2 <= 2, got {abs(alpha)**2}")
        return ("coherent", alpha)
    g0 = float(input_spec[1])
    if not 0.0 <= g0 <= 0.75:
        raise ValueError(f"squeezed input limited to 0 <= g0 <= 0.75, got {g0}")
    return ("squeezed", g0)


def _fock_input(input_spec: tuple, num_modes: int, cutoff: int) -> FockDensityMatrix:
    kind = input_spec[0]
    vac = np.zeros(cutoff, dtype=complex)
    vac[0] = 1.0
    if kind == "vacuum":
        vecs = [vac] * num_modes
    elif kind == "coherent":
        vecs = [_coherent_vector(cutoff, input_spec[1])] + [vac] * (num_modes - 1)
    else:
        vecs = [_squeezed_vector(cutoff, input_spec[1])] * num_modes
    return _gate_input(fock_product_state(vecs))


def _gauss_input(input_spec: tuple, num_modes: int) -> gc.GaussianState:
    kind = input_spec[0]
    state = gc.vacuum_state(num_modes)
    if kind == "coherent":
        alpha = input_spec[1]
        state = gc.displace(state, 0, alpha.real, alpha.imag)
    elif kind == "squeezed":
        for m in range(num_modes):
            state = gc.apply_single_mode_squeezer(state, m, input_spec[1])
    return state


def _channel_gain(channel: str, params: dict) -> float:
    if channel in ("single_squeezer", "two_mode_squeezer"):
        return float(params["g"])
    return 0.0


def compare_channel(
    channel: str,
    params: dict,
    input_spec: tuple,
    cutoff: int | None = None,
    max_dim: int = DEFAULT_MAX_DIM,
) -> DiscrepancyReport:
    """Run one channel in both tracks and report the moment discrepancies."""
    if channel not in _CHANNELS:
        raise ValueError(f"unknown channel {channel!r}; expected one of {_CHANNELS}")
    input_spec = _check_input_spec(input_spec)
    if _channel_gain(channel, params) > 0.75:
        raise ValueError("channel gains above 0.75 are out of the oracle's budget")
    num_modes = 2 if channel in _TWO_MODE_CHANNELS else 1
    ladder = (cutoff,) if cutoff is not None else CUTOFF_LADDER
    last_exc: CutoffTooSmallError | None = None
    for c in ladder:
        if c**num_modes > max_dim:
            raise ResourceLimitError(
                f"cutoff {c} over {num_modes} modes needs dimension {c**num_modes} "
                f"> max_dim {max_dim}"
            )
        try:
            fock_in = _fock_input(input_spec, num_modes, c)
            fock_out = fock_apply_channel(fock_in, channel, params)
        except CutoffTooSmallError as exc:
            last_exc = exc
            continue
        gauss_out = sm.apply_plan_step(_gauss_input(input_spec, num_modes), channel, params)
        mom = gc.photon_moments(gauss_out, range(num_modes))
        mean_f, var_f = fock_moments(fock_out, range(num_modes))
        return DiscrepancyReport(
            mean_n_gauss=mom.mean_n,
            mean_n_fock=mean_f,
            var_n_gauss=mom.var_n,
            var_n_fock=var_f,
            abs_error_mean=abs(mom.mean_n - mean_f),
            abs_error_var=abs(mom.var_n - var_f),
            tail_mass=tail_mass(fock_out),
        )
    raise last_exc


def _check_pipeline_budget(scenario: Scenario, cutoff: int | None) -> None:
    if scenario.model == "degenerate":
        if scenario.g > 0.5 or scenario.g_m > 0.5:
            raise ValueError("degenerate oracle pipelines need g and g_m <= 0.5")
        if abs(scenario.seed) ** 2 > 1.0:
            raise ValueError("degenerate oracle pipelines need |alpha|^2 <= 1")
    else:
        if scenario.g > 0.3 or scenario.g_m > 0.3:
            raise ValueError("nondegenerate oracle pipelines need g and g_m <= 0.3")
        power = abs(scenario.seed[0]) ** 2 + abs(scenario.seed[1]) ** 2
        if power > 1.0:
            raise ValueError("nondegenerate oracle pipelines need total seed power <= 1")
        if cutoff is None:
            raise ValueError("nondegenerate pipelines need an explicit cutoff <= 10")
        if cutoff > 10:
            raise ValueError("nondegenerate pipelines are limited to cutoff <= 10 per mode")


def compare_pipeline(
    scenario: Scenario,
    phi: float,
    cutoff: int | None = None,
    max_dim: int = DEFAULT_MAX_DIM,
) -> DiscrepancyReport:
    """Replay one full pipeline in both tracks; compare detector-plane moments.

    tail_mass in the report is the maximum over all Fock stages. Dimensions
    above max_dim raise ResourceLimitError before any allocation; the
    4-mode nondegenerate model hits this bound already at its permitted
    cutoffs unless max_dim is raised explicitly.
    """
    _check_pipeline_budget(scenario, cutoff)
    plan = plan_pipeline(scenario, phi, include_loss=True)
    ladder = (cutoff,) if cutoff is not None else (16, 24, 36, 48)
    last_exc: CutoffTooSmallError | None = None
    for c in ladder:
        dim = c**plan.num_modes
        if dim > max_dim:
            raise ResourceLimitError(
                f"cutoff {c} over {plan.num_modes} modes needs dimension {dim} "
                f"> max_dim {max_dim}"
            )
        try:
            report = _compare_pipeline_at(scenario, plan, c)
        except CutoffTooSmallError as exc:
            last_exc = exc
            continue
        return report
    raise last_exc


def _compare_pipeline_at(scenario: Scenario, plan, cutoff: int) -> DiscrepancyReport:
    alphas = [0j] * plan.num_modes
    body_start = 0
    for op, params in plan.steps:
        if op != "displace":
            break
        alphas[params["mode"]] = complex(params["alpha_re"], params["alpha_im"])
        body_start += 1
    if any(op == "displace" for op, _ in plan.steps[body_start:]):
        raise ValueError("pipeline displacements must all precede the channel body")
    fock = _gate_input(
        fock_product_state([_coherent_vector(cutoff, a) for a in alphas])
    )
    max_tail = tail_mass(fock)
    for op, params in plan.steps[body_start:]:
        fock = fock_apply_channel(fock, op, params)
        max_tail = max(max_tail, tail_mass(fock))
    gauss = gc.vacuum_state(plan.num_modes)
    for op, params in plan.steps:
        gauss = sm.apply_plan_step(gauss, op, params)
    mom = gc.photon_moments(gauss, plan.measured_modes)
    mean_f, var_f = fock_moments(fock, plan.measured_modes)
    return DiscrepancyReport(
        mean_n_gauss=mom.mean_n,
        mean_n_fock=mean_f,
        var_n_gauss=mom.var_n,
        var_n_fock=var_f,
        abs_error_mean=abs(mom.mean_n - mean_f),
        abs_error_var=abs(mom.var_n - var_f),
        tail_mass=max_tail,
    )


def channel_test_cases() -> tuple[ChannelCase, ...]:
    """The frozen channel validation matrix: 5 channels x 3 inputs."""
    vac = ("vacuum",)
    coh = ("coherent", 1.1 + 0.5j)
    cases = []
    for name, channel, params, sq_in, cutoffs in (
        ("phase", "phase", {"mode": 0, "theta": 0.7}, ("squeezed", 0.5), (8, 20, 40)),
        ("beamsplitter", "beamsplitter", {"mode_a": 0, "mode_b": 1}, ("squeezed", 0.25), (6, 20, 24)),
        (
            "single_squeezer",
            "single_squeezer",
            {"mode": 0, "g": 0.75, "pump_phase": 0.0},
            ("squeezed", 0.5),
            (64, 96, 176),
        ),
        (
            "two_mode_squeezer",
            "two_mode_squeezer",
            {"mode_a": 0, "mode_b": 1, "g": 0.4, "pump_phase": 0.0},
            ("squeezed", 0.25),
            (18, 36, 48),
        ),
        ("loss", "loss", {"mode": 0, "eta": 0.36}, ("squeezed", 0.5), (8, 20, 40)),
    ):
        for spec, cut, tag in zip((vac, coh, sq_in), cutoffs, ("vacuum", "coherent", "squeezed")):
            cases.append(
                ChannelCase(
                    name=f"{name}_{tag}", channel=channel, params=params, input_spec=spec, cutoff=cut
                )
            )
    return tuple(cases)


def pipeline_test_cases() -> tuple[PipelineCase, ...]:
    """The frozen degenerate pipeline validation matrix."""

    def scen(detection: str, **kw) -> Scenario:
        base = dict(
            model="degenerate", detection=detection, g=0.4, g_m=0.4, seed=1.0 + 0j
        )
        base.update(kw)
        return Scenario(**base)

    sym07 = LoopLossSpec(total_transmission=0.7, placement="symmetric")
    asym06 = LoopLossSpec(total_transmission=0.6, placement="opa_at_bs")
    return (
        PipelineCase("dd_lossless", scen("direct"), 0.05, 44),
        PipelineCase("dd_loop_loss_sym", scen("direct", loop_loss=sym07), 0.05, 44),
        PipelineCase("dd_loop_loss_asym", scen("direct", loop_loss=asym06), 0.05, 44),
        PipelineCase("ph_lossless", scen("parametric_homodyne"), 0.05, 44),
        PipelineCase("ph_loop_loss", scen("parametric_homodyne", loop_loss=sym07), 0.05, 44),
        PipelineCase(
            "ph_detector_loss", scen("parametric_homodyne", detector_efficiency=0.8), 0.05, 44
        ),
        PipelineCase(
            "ph_all_loss",
            scen("parametric_homodyne", loop_loss=sym07, detector_efficiency=0.8),
            0.05,
            44,
        ),
        PipelineCase("dd_phi0", scen("direct"), 0.0, 44),
    )
