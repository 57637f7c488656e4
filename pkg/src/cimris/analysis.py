"""Analytical error probabilities and link-budget calculators for CIM-RIS.

Average BER breakdown::

    p_total = (2 u2 / u) p_sc + (u1 / u) p_mod
    p_mod   = p_m (1 - p_ci) + p_ci / 2
    p_sc    = p_ci / (2 u2)

Two parameterisations of the code-index error probability ``p_ci`` are
provided:

``"printed"``
    The order-statistics integral with the literal chi-square parameters
    (sigma_xi^2 = 2 (E_c N_0)^2, sigma_lambda^2 = 2 (E_c N_0)^2 + 4 E_c N_0
    kappa^2) and a half-normal noncentrality with variance
    (x_re E_c)^2 sigma_h^2.  It does not depend on N and saturates at a
    noise-ordering constant over the usual SNR range.
``"consistent"``
    The same order-statistics structure with parameters that match the
    simulated receiver: every (real) despreader branch has noise variance
    N_0 / 2 after 1/sqrt(K) normalisation, competitors are central
    chi-square with one degree of freedom, the matched branch has mean
    A |x_re|, and A follows its central-limit Gaussian law
    N(pi N sigma^2 / 4, (1 - pi^2/16) N sigma^4).

``p_m`` is the MGF-bound QAM expression in both cases.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .params import ConfigError, Scheme, SystemConfig, is_power_of_four, log2_int
from .qam import constellation

_TAIL_SIGMAS = math.sqrt(2.0 * math.log(1e18))  # Gaussian factor < 1e-18 of its peak


class QuadratureError(RuntimeError):
    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (residual estimate {residual:.3g})")


class ClampWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class QuadTolerance:
    epsabs: float = 1e-12
    epsrel: float = 1e-9
    kappa_sigmas: float = 10.0  # truncation of the noncentrality integral
    limit: int = 200


DEFAULT_TOL = QuadTolerance()


def _quad(func, a, b, tol: QuadTolerance, points=None):
    kw = dict(epsabs=tol.epsabs, epsrel=tol.epsrel, limit=tol.limit, full_output=1)
    if points:
        kw["points"] = points
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(func, a, b, **kw)
    value, abserr, info = out[0], out[1], out[2]
    if len(out) > 3 and out[3] and abserr > max(100 * tol.epsabs, 1e3 * tol.epsrel * abs(value)):
        raise QuadratureError(f"quadrature did not converge on [{a:g}, {b:g}]", abserr)
    return value


def _clamp(p: float, lo: float = 0.0, hi: float = 1.0, slack: float = 1e-8) -> float:
    if p < lo - slack or p > hi + slack:
        warnings.warn(f"probability {p!r} clamped to [{lo}, {hi}]", ClampWarning, stacklevel=3)
    return min(max(p, lo), hi)


# ---------------------------------------------------------------------------
# special functions and densities
# ---------------------------------------------------------------------------

def bessel_i_neg_half(y):
    """Modified Bessel function of the first kind, order -1/2.

    Closed form ``sqrt(2 / (pi y)) cosh(y)`` for ``y > 0``.
    """
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ValueError("I_{-1/2}(y) is evaluated for y > 0 only")
    out = np.sqrt(2.0 / (np.pi * y)) * np.cosh(y)
    return float(out) if out.ndim == 0 else out


def bessel_i_neg_half_scaled(y):
    """``exp(-y) I_{-1/2}(y)``, finite for large ``y``."""
    y = np.asarray(y, dtype=float)
    return np.sqrt(2.0 / (np.pi * y)) * 0.5 * (1.0 + np.exp(-2.0 * y))


@dataclass(frozen=True)
class ChiSquareParams:
    kappa: float
    sigma_xi2: float
    sigma_lambda2: float
    sigma_chi2: "float | None" = None


def chi_square_params(kappa: float, E_c: float, N0: float, x_re: "float | None" = None,
                      sigma_h2: float = 1.0) -> ChiSquareParams:
    """Literal variances of the despreader order statistics."""
    sigma_xi2 = 2.0 * (E_c * N0) ** 2
    sigma_lambda2 = sigma_xi2 + 4.0 * E_c * N0 * kappa**2
    sigma_chi2 = None if x_re is None else (x_re * E_c) ** 2 * sigma_h2
    return ChiSquareParams(kappa, sigma_xi2, sigma_lambda2, sigma_chi2)


def noncentral_chi2_pdf(lam, kappa: float, sigma2: float):
    """One-degree-of-freedom noncentral chi-square density.

    ``f(l) = 1/(2 s2) (l/kappa^2)^(-1/4) exp(-(kappa^2 + l)/(2 s2)) I_{-1/2}(kappa sqrt(l)/s2)``,
    the law of ``(kappa + sqrt(s2) Z)^2``.
    """
    lam = np.asarray(lam, dtype=float)
    v = np.sqrt(np.maximum(lam, 0.0))
    y = kappa * v / sigma2
    with np.errstate(divide="ignore", invalid="ignore"):
        body = (lam / kappa**2) ** -0.25 * np.exp(-((v - kappa) ** 2) / (2 * sigma2)) \
            * bessel_i_neg_half_scaled(y) / (2 * sigma2)
    return np.where(lam > 0, body, 0.0)


def _sqrt_density(v, kappa: float, sigma2: float):
    """Density of sqrt(lambda): 2 v f(v^2), smooth at v = 0."""
    v = np.asarray(v, dtype=float)
    y = kappa * v / sigma2
    with np.errstate(divide="ignore", invalid="ignore"):
        body = (v / sigma2) * (v / kappa) ** -0.5 * np.exp(-((v - kappa) ** 2) / (2 * sigma2)) \
            * bessel_i_neg_half_scaled(y)
    small = math.sqrt(2.0 / (math.pi * sigma2)) * np.exp(-(kappa**2) / (2 * sigma2))
    return np.where(v > 0, body, small)


# ---------------------------------------------------------------------------
# code-index error probability
# ---------------------------------------------------------------------------

def pci_given_kappa(kappa: float, E_c: float, N0: float, L: int,
                    tol: QuadTolerance = DEFAULT_TOL) -> float:
    """Order-statistics probability Pr(lambda < min_l xi_l) for fixed kappa.

    ``int_0^inf exp(-lambda (L-1) / (2 sigma_xi^2)) f_lambda(lambda) d lambda``
    with the survival factor inside the integrand; evaluated in
    ``v = sqrt(lambda)`` to remove the lambda^(-1/2) endpoint singularity.
    """
    if not (kappa > 0 and E_c > 0 and N0 > 0):
        raise ValueError("kappa, E_c and N0 must be positive")
    if L < 2:
        raise ValueError("L must be >= 2")
    p = chi_square_params(kappa, E_c, N0)
    rate = (L - 1) / (2.0 * p.sigma_xi2)
    s2 = p.sigma_lambda2
    vmax = kappa + _TAIL_SIGMAS * math.sqrt(s2)

    def integrand(v):
        return float(np.exp(-rate * v * v) * _sqrt_density(v, kappa, s2))

    value = _quad(integrand, 0.0, vmax, tol, points=[kappa] if kappa < vmax else None)
    return _clamp(value)


def half_normal_pdf(kappa, sigma_chi2: float):
    """Generalised-Rayleigh (one degree of freedom) density of |chi|."""
    s = math.sqrt(sigma_chi2)
    return math.sqrt(2.0) / (s * special.gamma(0.5)) * np.exp(-np.square(kappa) / (2 * sigma_chi2))


def pci_average(E_c: float, N0: float, L: int, sigma_chi2: float,
                tol: QuadTolerance = DEFAULT_TOL) -> float:
    """:func:`pci_given_kappa` averaged over the half-normal noncentrality."""
    if not sigma_chi2 > 0:
        raise ValueError("sigma_chi2 must be positive")
    kmax = tol.kappa_sigmas * math.sqrt(sigma_chi2)

    def integrand(k):
        if k <= 0:
            return 0.0
        return pci_given_kappa(k, E_c, N0, L, tol) * float(half_normal_pdf(k, sigma_chi2))

    return _clamp(_quad(integrand, 0.0, kmax, tol))


def pci_real_branch(kappa: float, sigma2: float, L: int,
                    tol: QuadTolerance = DEFAULT_TOL) -> float:
    """Pr(matched branch is not the largest) for real Gaussian despreader outputs.

    Matched output ~ N(kappa, sigma2), the L-1 others ~ N(0, sigma2); the
    squared outputs are noncentral / central chi-square with one degree of
    freedom.  Computed as ``int (1 - F_xi(v^2)^(L-1)) 2v f_lambda(v^2) dv``
    with ``F_xi(v^2) = erf(v / sqrt(2 sigma2))``.
    """
    if L < 2:
        raise ValueError("L must be >= 2")
    if kappa < 0 or not sigma2 > 0:
        raise ValueError("kappa >= 0 and sigma2 > 0 required")
    s = math.sqrt(sigma2)
    if kappa == 0:
        return (L - 1) / L
    vmax = kappa + _TAIL_SIGMAS * s

    def integrand(v):
        if v <= 0:
            return 0.0
        fail = -math.expm1((L - 1) * math.log1p(-math.erfc(v / (math.sqrt(2.0) * s))))
        return fail * float(_sqrt_density(v, kappa, sigma2))

    return _clamp(_quad(integrand, 0.0, vmax, tol, points=[kappa]))


def pci_consistent(N: int, N0: float, L: int, M: int, sigma2: float = 1.0,
                   nodes: int = 48, tol: QuadTolerance = DEFAULT_TOL) -> float:
    """Index error probability averaged over the CLT gain law and the
    constellation's in-phase amplitudes."""
    qam = constellation(M)
    amps = np.unique(np.abs(np.round(qam.levels_i, 12)))
    x, w = np.polynomial.hermite_e.hermegauss(nodes)
    w = w / w.sum()
    mean = 0.25 * np.pi * N * sigma2
    sd = math.sqrt((1 - np.pi**2 / 16) * N) * sigma2
    total = 0.0
    for a, wa in zip(mean + sd * x, w):
        for amp in amps:
            total += wa * pci_real_branch(abs(a) * amp, N0 / 2.0, L, tol)
    return _clamp(total / len(amps))


# ---------------------------------------------------------------------------
# QAM symbol error bound
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MgfParams:
    U1: float
    U2: float
    gamma_bar: float

    @classmethod
    def for_surface(cls, N: int, gamma_bar: float) -> "MgfParams":
        d = 16.0 - np.pi**2
        return cls(8.0 / (N * d), N * np.pi**2 / (2.0 * d), gamma_bar)


def mgf_gamma(s, N: int, gamma_bar: float):
    """Moment-generating function of the instantaneous SNR (CLT gain)."""
    p = MgfParams.for_surface(N, gamma_bar)
    sg = np.asarray(s, dtype=float) * gamma_bar
    return np.sqrt(p.U1 / (p.U1 + sg)) * np.exp(-sg * p.U2 / (p.U2 + sg))


def mgf_gamma_noncentral(s, N: int, gamma_bar: float):
    """E[exp(-s gamma_bar A^2)] for Gaussian A with the CLT mean and variance.

    Differs from :func:`mgf_gamma` only in the exponent denominator
    (U1 + s gamma_bar); this is the form whose first-order term matches
    :func:`mgf_gamma_lowsnr` up to the O(1/N) variance contribution.
    """
    p = MgfParams.for_surface(N, gamma_bar)
    sg = np.asarray(s, dtype=float) * gamma_bar
    return np.sqrt(p.U1 / (p.U1 + sg)) * np.exp(-sg * p.U2 / (p.U1 + sg))


def mgf_gamma_lowsnr(s, N: int, gamma_bar: float):
    """Low-SNR form exp(-(U2/U1) s gamma_bar) = exp(-N^2 pi^2 s gamma_bar / 16)."""
    p = MgfParams.for_surface(N, gamma_bar)
    return np.exp(-(p.U2 / p.U1) * np.asarray(s, dtype=float) * gamma_bar)


@dataclass(frozen=True)
class QamGeometry:
    M_I: int
    M_Q: int
    beta_q: float = 1.0

    @classmethod
    def square(cls, M: int) -> "QamGeometry":
        if not is_power_of_four(M) or M < 4:
            raise ConfigError("m", f"analytical P_M needs square QAM, got M={M}")
        m = int(round(math.sqrt(M)))
        return cls(m, m)

    @property
    def p(self) -> float:
        return 1.0 - 1.0 / self.M_I

    @property
    def q(self) -> float:
        return 1.0 - 1.0 / self.M_Q

    @property
    def t(self) -> float:
        return math.sqrt(6.0 / ((self.M_I**2 - 1) + (self.M_Q**2 - 1) * self.beta_q**2))

    @property
    def z(self) -> float:
        return self.beta_q * self.t


def pm_qam(M: int, N: int, gamma_bar: float, u1: "int | None" = None) -> float:
    """Modulated-bit error probability from the MGF-bounded QAM ASER.

    ``(1/u1) [p e^{-a t^2} + q e^{-a z^2} - (2pq/pi)(atan(z/t) + acot(z/t)) e^{-a (t^2+z^2)}]``
    with ``a = pi^2 N^2 gamma_bar / 32``; clamped to [0, 1/2].
    """
    geo = QamGeometry.square(M)
    u1 = log2_int(M) if u1 is None else u1
    a = np.pi**2 * N**2 * gamma_bar / 32.0
    p, q, t, z = geo.p, geo.q, geo.t, geo.z
    angle = math.atan(z / t) + (math.pi / 2 - math.atan(z / t))
    ser = (p * math.exp(-a * t * t) + q * math.exp(-a * z * z)
           - (2 * p * q / math.pi) * angle * math.exp(-a * (t * t + z * z)))
    return _clamp(ser / u1, 0.0, 0.5, slack=0.5)


# ---------------------------------------------------------------------------
# ABER composition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AberBreakdown:
    p_ci: float
    p_sc: float
    p_m: float
    p_mod: float
    p_total: float

    def as_row(self) -> dict:
        return {"p_ci": self.p_ci, "p_sc": self.p_sc, "p_m": self.p_m,
                "p_mod": self.p_mod, "p_total": self.p_total}


def compose_aber(p_ci: float, p_m: float, u1: int, u2: int) -> AberBreakdown:
    u = u1 + 2 * u2
    p_sc = p_ci / (2 * u2)
    p_mod = p_m * (1 - p_ci) + 0.5 * p_ci
    return AberBreakdown(p_ci, p_sc, p_m, p_mod, (2 * u2 / u) * p_sc + (u1 / u) * p_mod)


def gamma_bar_for_snr(snr_db: float, u: int) -> float:
    """E_s / N_0 when SNR (dB) is E_b / N_0 with E_b = E_s / u."""
    return u * 10.0 ** (snr_db / 10.0)


MODELS = ("printed", "consistent")


def aber_cim_ris(config: SystemConfig, gamma_bar: float, model: str = "printed",
                 x_re: "float | None" = None, tol: QuadTolerance = DEFAULT_TOL) -> AberBreakdown:
    """Analytical ABER of CIM-RIS at ``gamma_bar = E_s / N_0``.

    ``x_re`` is the in-phase amplitude used in the printed noncentrality
    variance; default is the constellation's RMS in-phase amplitude.
    """
    if config.scheme is not Scheme.CIM_RIS:
        raise ConfigError("scheme", "analytical ABER exists for CIM-RIS only")
    M, L, N = config.modulation_order, config.code_count, config.ris_elements
    QamGeometry.square(M)
    b = config.budget
    N0 = 1.0 / gamma_bar
    if model == "printed":
        amp = constellation(M).rms_inphase() if x_re is None else x_re
        E_c = 1.0
        p_ci = pci_average(E_c, N0, L, (amp * E_c) ** 2 * config.sigma2, tol)
    elif model == "consistent":
        p_ci = pci_consistent(N, N0, L, M, config.sigma2, tol=tol)
    else:
        raise ConfigError("model", f"unknown analytical model {model!r}; use one of {MODELS}")
    return compose_aber(p_ci, pm_qam(M, N, gamma_bar, b.u1), b.u1, b.u2)


def aber_curve(config: SystemConfig, snr_grid=None, model: str = "printed", **kw) -> list[dict]:
    rows = []
    u = config.bits_per_interval
    for snr in (config.snr_grid if snr_grid is None else snr_grid):
        br = aber_cim_ris(config, gamma_bar_for_snr(snr, u), model=model, **kw)
        rows.append({"scheme": config.scheme.value, "snr_db": float(snr), **br.as_row()})
    return rows


# ---------------------------------------------------------------------------
# energy, complexity, throughput
# ---------------------------------------------------------------------------

def energy_saving_percent(u: int, u_b: int) -> float:
    """Energy saved per u bits relative to a benchmark carrying u_b bits."""
    if u_b < 1 or u < 1:
        raise ValueError("bit counts must be positive")
    if u_b > u:
        raise ValueError(f"benchmark carries more bits ({u_b}) than CIM-RIS ({u})")
    return 100.0 * (1.0 - u_b / u)


def complexity_rms(scheme: "Scheme | str", M: int, N: int, N_T: "int | None" = None,
                   K: "int | None" = None, L: "int | None" = None,
                   u2: "int | None" = None) -> float:
    """Real multiplications per symbol interval of the detector."""
    scheme = Scheme.parse(scheme)
    if u2 is None and L is not None:
        u2 = log2_int(L)
    base = N + 4 * M
    if scheme is Scheme.CIM_RIS:
        if K is None or L is None:
            raise ValueError("CIM-RIS complexity needs K and L")
        return float(8 * K * L + N + 4 * M)
    if u2 is None:
        raise ValueError("benchmark complexity needs u2 (or L)")
    if scheme is Scheme.RIS:
        return base * (1 + 2 * u2 / math.log2(M))
    if N_T is None:
        raise ValueError("spatial-modulation complexity needs N_T")
    if scheme is Scheme.TSM_RIS:
        return 8 * base * N_T * (1 + 2 * u2 / math.log2(M * N_T))
    return 8 * base * N_T * (1 + 2 * u2 / math.log2(M * N_T**2))


def throughput(ber_total: float, u: int, tau_s: float = 1.0) -> float:
    if not 0.0 <= ber_total <= 1.0:
        raise ValueError("ber_total must lie in [0, 1]")
    if not tau_s > 0:
        raise ValueError("tau_s must be positive")
    return (1.0 - ber_total) * u / tau_s
