"""Large-deviation expansion of the symmetric Binomial tail and the cutpoint
approximations built on it.

All quantities are indexed by N = n - 1, K = k - 1 and the standardized
index eps = (2K - N)/N, with x = eps sqrt(N) the leading normal deviate.
The main objects:

    gamma(eps)     entropy-defect coefficient, 1/12 at 0, log 2 - 1/2 at 1
    Delta, Lambda  Stirling/Laplace bookkeeping for the beta integral
    an_*           tail expansion  log P{X >= k} = -psi(x) + A_n(eps)
    w, theta       cutpoint expansion  z_k = w_k + theta_k
    eq. (11)       explicit lower/upper log-tail sandwich
    delta sandwich two-root bracket x + d2 <= z_k <= x + d1
    Tusnady bracket  k - 1 <= beta_k <= 3n/2 - sqrt(2n(n-k))
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .binom_exact import ExactTail, lambda_n
from .cutpoints import epsilon_of
from .errors import DomainError, SmallEpsilonRegime
from .normal_tail import psi, rho

__all__ = [
    "ApproxBreakdown",
    "TusnadyCheck",
    "gamma_eps",
    "s_eps",
    "laplace_pieces",
    "h_aux",
    "h_third",
    "theorem1_breakdown",
    "theorem2_w",
    "theorem2_theta",
    "full_breakdown",
    "lower_bound_11",
    "delta_sandwich",
    "tusnady_bounds",
    "eq4_extreme",
    "eq5_bounds",
]

_GAMMA_SEAM = 0.05


def gamma_eps(epsilon: float) -> float:
    """Entropy-defect coefficient

        [(1+e) log(1+e) + (1-e) log(1-e) - e^2] / (2 e^4),

    increasing on [0, 1] from 1/12 to log 2 - 1/2.  Below the seam the
    closed form loses ~8 digits to cancellation, so a power series in e^2
    is used there; the branches agree to 1e-12 at the seam.
    """
    e = float(epsilon)
    if not (0.0 <= e <= 1.0):
        raise DomainError(f"epsilon must be in [0, 1], got {epsilon!r}")
    if e < _GAMMA_SEAM:
        # sum_{r>=0} e^{2r} / ((2r+3)(2r+4))
        e2 = e * e
        total = 0.0
        term_pow = 1.0
        r = 0
        while True:
            term = term_pow / ((2 * r + 3) * (2 * r + 4))
            total += term
            if term < 1e-17:
                return total
            term_pow *= e2
            r += 1
    if e == 1.0:
        # (1-e) log(1-e) -> 0 (removable)
        return (2.0 * math.log(2.0) - 1.0) / 2.0
    num = ((1.0 + e) * math.log1p(e) + (1.0 - e) * math.log1p(-e) - e * e)
    return num / (2.0 * e ** 4)


def s_eps(epsilon: float) -> float:
    """Cutpoint scale factor sqrt(1 + 2 e^2 gamma(e)); 1 at 0, ~1.1774 at 1."""
    e = float(epsilon)
    return math.sqrt(1.0 + 2.0 * e * e * gamma_eps(e))


def h_aux(s: float, epsilon: float) -> float:
    """Centered exponent of the beta integrand,
    h(s) = [(1+e) log(1-s) + (1-e) log(1+s)] / 2: zero at s = 0, concave
    and decreasing on [0, 1)."""
    s = float(s)
    e = float(epsilon)
    if not (0.0 <= s < 1.0):
        raise DomainError(f"s must be in [0, 1), got {s!r}")
    if not (0.0 <= e <= 1.0):
        raise DomainError(f"epsilon must be in [0, 1], got {epsilon!r}")
    return 0.5 * ((1.0 + e) * math.log1p(-s) + (1.0 - e) * math.log1p(s))


def h_third(s: float, epsilon: float) -> float:
    """Third derivative of h_aux: (1-e)/(1+s)^3 - (1+e)/(1-s)^3, decreasing
    in s with value -2e at s = 0."""
    s = float(s)
    e = float(epsilon)
    if not (0.0 <= s < 1.0):
        raise DomainError(f"s must be in [0, 1), got {s!r}")
    return (1.0 - e) / (1.0 + s) ** 3 - (1.0 + e) / (1.0 - s) ** 3


def _eps_range_check(n: int, k: int, n_min: int = 3) -> float:
    if n < n_min:
        raise DomainError(f"n must be >= {n_min}, got {n}")
    if not (n / 2 < k <= n - 1):
        raise DomainError(f"k must satisfy n/2 < k <= n-1, got k = {k}")
    return epsilon_of(n, k)


def laplace_pieces(n: int, k: int) -> tuple[float, float, float]:
    """The Stirling/Laplace bookkeeping for (n, k): returns

        (H(1/2) - H(K/N),  Delta,  Lambda)

    where 2 H(t) = (1+e) log t + (1-e) log(1-t),
    Lambda = lam_N - lam_K - lam_{N-K} and
    Delta = log(1 + 1/N) + Lambda - log(1 - e^2)/2 - N e^4 gamma(e).

    The identity H(1/2) - H(K/N) = -e^2/2 - e^4 gamma(e) is re-derived by a
    second, direct evaluation and asserted to 1e-12.
    """
    e = _eps_range_check(n, k)
    N, K = n - 1, k - 1
    g = gamma_eps(e)

    h_diff = -0.5 * e * e - e ** 4 * g
    # independent direct route: H(1/2) = -log 2, H(K/N) with K/N = (1+e)/2
    h_mode = 0.5 * ((1.0 + e) * (math.log1p(e) - math.log(2.0))
                    + (1.0 - e) * (math.log1p(-e) - math.log(2.0)))
    direct = -math.log(2.0) - h_mode
    if abs(direct - h_diff) > 1e-12 * max(1.0, abs(h_diff)):
        raise AssertionError(
            f"entropy identity violated at (n={n}, k={k}): "
            f"{direct} vs {h_diff}")

    lam = lambda_n(N).lam - lambda_n(K).lam - lambda_n(N - K).lam
    delta = (math.log1p(1.0 / N) + lam - 0.5 * math.log1p(-e * e)
             - N * e ** 4 * g)
    return h_diff, delta, lam


@dataclass(frozen=True)
class ApproxBreakdown:
    """Every expansion term for one (n, k)."""

    n: int
    k: int
    epsilon: float
    gamma: float
    s_eps: float
    Lambda: float
    Delta: float
    an_main: float   # -N e^4 gamma - log(1-e^2)/2 - lam_{n-k}
    an_exact: float  # log tail + psi(e sqrt(N))
    r_k: float       # an_exact - an_main
    ell_N: float     # log(N)/N
    eta: float
    kappa_sq: float
    w_k: float = math.nan
    theta_k: float = math.nan


def _eta_kappa(n: int, k: int) -> tuple[float, float, float]:
    e = epsilon_of(n, k)
    N = n - 1
    ell = math.log(N) / N
    # eta solves eta^2/2 + eta e = ell; stable root form avoids cancellation
    eta = 2.0 * ell / (e + math.sqrt(e * e + 2.0 * ell))
    kappa_sq = 1.0 - eta * h_third(eta, e) / 3.0
    return ell, eta, kappa_sq


def theorem1_breakdown(n: int, k: int, exact: ExactTail) -> ApproxBreakdown:
    """Tail-expansion terms: log P{X >= k} = -psi(x) + A_n with
    A_n = -N e^4 gamma(e) - log(1-e^2)/2 - lam_{n-k} + r_k."""
    if n < 28:
        raise DomainError(f"n must be >= 28, got {n}")
    if k == n:
        raise DomainError("the expansion excludes the extreme k = n")
    e = _eps_range_check(n, k, n_min=28)
    if (exact.n, exact.k) != (n, k):
        raise DomainError("exact tail does not match (n, k)")
    N = n - 1
    g = gamma_eps(e)
    x = e * math.sqrt(N)
    _, delta, lam = laplace_pieces(n, k)
    an_exact = exact.log_prob + psi(x)
    an_main = -N * e ** 4 * g - 0.5 * math.log1p(-e * e) - lambda_n(n - k).lam
    ell, eta, kappa_sq = _eta_kappa(n, k)
    return ApproxBreakdown(
        n=n, k=k, epsilon=e, gamma=g, s_eps=s_eps(e), Lambda=lam, Delta=delta,
        an_main=an_main, an_exact=an_exact, r_k=an_exact - an_main,
        ell_N=ell, eta=eta, kappa_sq=kappa_sq)


def theorem2_w(n: int, k: int) -> float:
    """Main cutpoint formula
    w = x S(e) + [log(1-e^2) + 2 lam_{n-k}] / (2 x S(e)), x = e sqrt(N)."""
    e = _eps_range_check(n, k, n_min=28)
    if e == 0.0:
        raise DomainError("epsilon must be positive")
    N = n - 1
    xs = e * math.sqrt(N) * s_eps(e)
    return xs + (math.log1p(-e * e) + 2.0 * lambda_n(n - k).lam) / (2.0 * xs)


def theorem2_theta(n: int, k: int, z_k: float) -> float:
    """Residual theta = z_k - w_k of the cutpoint formula."""
    return float(z_k) - theorem2_w(n, k)


def full_breakdown(n: int, k: int, exact: ExactTail,
                   z_k: float) -> ApproxBreakdown:
    """theorem1_breakdown plus the cutpoint terms w and theta."""
    b = theorem1_breakdown(n, k, exact)
    w = theorem2_w(n, k)
    return replace(b, w_k=w, theta_k=float(z_k) - w)


def lower_bound_11(n: int, k: int) -> tuple[float, float]:
    """Explicit log-tail sandwich:

        lower = Delta - log kappa - psi(x) + log(1 - exp(-N e eta - N k^2 eta^2/2))
        upper = Delta - psi(x)

    with eta the root of eta^2/2 + eta e = log(N)/N and
    kappa^2 = 1 - eta h'''(eta)/3.  Both bracket the exact log tail.
    """
    e = _eps_range_check(n, k, n_min=28)
    N = n - 1
    x = e * math.sqrt(N)
    _, delta, _ = laplace_pieces(n, k)
    ell, eta, kappa_sq = _eta_kappa(n, k)
    # the construction needs a short eta and a mild variance inflation
    if eta > 0.5:
        raise AssertionError(f"eta = {eta} > 1/2 at (n={n}, k={k})")
    if eta <= 0.5 and kappa_sq > 1.0 + 6.0 * eta * (eta + e) + 1e-12:
        raise AssertionError(
            f"kappa^2 bound violated at (n={n}, k={k}): {kappa_sq}")
    quad = 0.5 * eta * eta + eta * e
    if abs(quad - ell) > 1e-12 * max(1.0, ell):
        raise AssertionError(f"eta equation violated at (n={n}, k={k})")

    log_tail_normal = -psi(x)
    upper = delta + log_tail_normal
    bracket = math.log1p(-math.exp(-N * e * eta
                                   - 0.5 * N * kappa_sq * eta * eta))
    lower = delta - 0.5 * math.log(kappa_sq) + log_tail_normal + bracket
    return lower, upper


def delta_sandwich(n: int, k: int, z_k: float) -> tuple[float, float, float]:
    """Two-root bracket for the cutpoint.  With x = e sqrt(N) and
    beta = psi(z_k) - psi(x), the roots

        d1 x + d1^2/2 = beta = d2 rho(x) + d2^2/2

    satisfy x + d2 <= z_k <= x + d1.  Returns (d1, d2, beta).

    Raises SmallEpsilonRegime when beta <= 0 (near-center case, where the
    bracket construction does not apply).
    """
    e = _eps_range_check(n, k, n_min=28)
    N = n - 1
    x = e * math.sqrt(N)
    z_k = float(z_k)
    beta = psi(z_k) - psi(x)
    if beta <= 0.0:
        raise SmallEpsilonRegime(
            f"beta = {beta} <= 0 at (n={n}, k={k}): sandwich not applicable")
    rx = rho(x)
    d1 = 2.0 * beta / (math.sqrt(x * x + 2.0 * beta) + x)
    d2 = 2.0 * beta / (math.sqrt(rx * rx + 2.0 * beta) + rx)
    for d, slope in ((d1, x), (d2, rx)):
        resid = d * slope + 0.5 * d * d - beta
        if abs(resid) > 1e-10 * max(1.0, beta):
            raise AssertionError(
                f"quadratic identity violated at (n={n}, k={k}): {resid}")
    if not (x + d2 <= z_k + 1e-9 and z_k <= x + d1 + 1e-9):
        raise AssertionError(
            f"sandwich violated at (n={n}, k={k}): "
            f"{x + d2} <= {z_k} <= {x + d1}")
    return d1, d2, beta


@dataclass(frozen=True)
class TusnadyCheck:
    holds_lower: bool
    holds_upper: bool
    slack_lower: float  # beta_k - (k - 1)
    slack_upper: float  # 3n/2 - sqrt(2n(n-k)) - beta_k


def tusnady_bounds(n: int, k: int, beta_k: float,
                   tol: float = 1e-9) -> TusnadyCheck:
    """Classical cutpoint bracket k - 1 <= beta_k <= 3n/2 - sqrt(2n(n-k))."""
    if not (n / 2 <= k <= n):
        raise DomainError(f"k must satisfy n/2 <= k <= n, got k = {k}")
    beta_k = float(beta_k)
    slack_lower = beta_k - (k - 1)
    slack_upper = 1.5 * n - math.sqrt(2.0 * n * (n - k)) - beta_k
    return TusnadyCheck(holds_lower=slack_lower >= -tol,
                        holds_upper=slack_upper >= -tol,
                        slack_lower=slack_lower, slack_upper=slack_upper)


def eq4_extreme(n: int, B: int) -> float:
    """Main term of the extreme-cutpoint asymptotic:
    beta_{n-B} ~ (1+c)n/2 - (1+2B) log(n)/(4c) with c = s_eps(1)."""
    if B not in (1, 2, 3):
        raise DomainError(f"B must be 1, 2 or 3, got {B}")
    if n < 64 or n - B <= n / 2:
        raise DomainError(f"n too small for B = {B}, got n = {n}")
    c = s_eps(1.0)
    return (1.0 + c) / 2.0 * n - (1.0 + 2.0 * B) * math.log(n) / (4.0 * c)


def eq5_bounds(n: int, k: int, beta_k: float,
               constants: tuple[float, float, float, float]) -> bool:
    """Continuity-corrected cutpoint window with a cubic center term:

        -C1/sqrt(n) + C2 |k-n/2|^3/n^2
            <= beta_k - k + 1/2 <=
        C3 log(n)/sqrt(n) + C4 |k-n/2|^3/n^2
    """
    if not (n / 2 <= k <= n):
        raise DomainError(f"k must satisfy n/2 <= k <= n, got k = {k}")
    c1, c2, c3, c4 = (float(c) for c in constants)
    if min(c1, c2, c3, c4) <= 0.0:
        raise DomainError("all four constants must be positive")
    t = abs(k - n / 2) ** 3 / n ** 2
    d = float(beta_k) - k + 0.5
    sqrt_n = math.sqrt(n)
    return (-c1 / sqrt_n + c2 * t <= d <= c3 * math.log(n) / sqrt_n + c4 * t)
