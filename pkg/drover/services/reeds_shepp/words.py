"""Reeds-Shepp word formulas in normalized coordinates (unit turning radius).

Each formula solves one base word for a goal ``(x, y, phi)`` expressed in
the start frame. The other words of a family follow from time-flip
``(-x, y, -phi)`` and reflection ``(x, -y, -phi)``. Arc values are signed
angles, straight values signed distances; negative means reverse.
"""

import math
from typing import Iterator, Optional, Tuple

HALF_PI = 0.5 * math.pi
TWO_PI = 2.0 * math.pi
ZERO = 10 * 2.220446049250313e-16

# Steering letters of every word
L, R, S = "L", "R", "S"
WORDS = (
    (L, R, L), (R, L, R),
    (L, R, L, R), (R, L, R, L),
    (L, R, S, L), (R, L, S, R), (L, S, R, L), (R, S, L, R),
    (L, R, S, R), (R, L, S, L), (R, S, R, L), (L, S, L, R),
    (L, S, R), (R, S, L), (L, S, L), (R, S, R),
    (L, R, S, L, R), (R, L, S, R, L),
)

Candidate = Tuple[int, Tuple[float, ...]]


def mod2pi(angle: float) -> float:
    """Wrap into [-pi, pi]."""
    v = math.fmod(angle, TWO_PI)
    if v < -math.pi:
        v += TWO_PI
    elif v > math.pi:
        v -= TWO_PI
    return v


def polar(x: float, y: float) -> Tuple[float, float]:
    return math.hypot(x, y), math.atan2(y, x)


def tau_omega(u: float, v: float, xi: float, eta: float, phi: float) -> Tuple[float, float]:
    delta = mod2pi(u - v)
    a = math.sin(u) - math.sin(delta)
    b = math.cos(u) - math.cos(delta) - 1.0
    t1 = math.atan2(eta * a - xi * b, xi * a + eta * b)
    t2 = 2.0 * (math.cos(delta) - math.cos(v) - math.cos(u)) + 3.0
    tau = mod2pi(t1 + math.pi) if t2 < 0 else mod2pi(t1)
    omega = mod2pi(tau - u + v - phi)
    return tau, omega


# Base words

def lp_sp_lp(x, y, phi) -> Optional[Tuple[float, float, float]]:
    u, t = polar(x - math.sin(phi), y - 1.0 + math.cos(phi))
    if t >= -ZERO:
        v = mod2pi(phi - t)
        if v >= -ZERO:
            return t, u, v
    return None


def lp_sp_rp(x, y, phi) -> Optional[Tuple[float, float, float]]:
    u1, t1 = polar(x + math.sin(phi), y - 1.0 - math.cos(phi))
    u1 = u1 * u1
    if u1 >= 4.0:
        u = math.sqrt(u1 - 4.0)
        theta = math.atan2(2.0, u)
        t = mod2pi(t1 + theta)
        v = mod2pi(t - phi)
        if t >= -ZERO and v >= -ZERO:
            return t, u, v
    return None


def lp_rm_l(x, y, phi) -> Optional[Tuple[float, float, float]]:
    xi = x - math.sin(phi)
    eta = y - 1.0 + math.cos(phi)
    u1, theta = polar(xi, eta)
    if u1 <= 4.0:
        u = -2.0 * math.asin(0.25 * u1)
        t = mod2pi(theta + 0.5 * u + math.pi)
        v = mod2pi(phi - t + u)
        if t >= -ZERO and u <= ZERO:
            return t, u, v
    return None


def lp_rup_lum_rm(x, y, phi) -> Optional[Tuple[float, float, float]]:
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho = 0.25 * (2.0 + math.sqrt(xi * xi + eta * eta))
    if rho <= 1.0:
        u = math.acos(rho)
        t, v = tau_omega(u, -u, xi, eta, phi)
        if t >= -ZERO and v <= ZERO:
            return t, u, v
    return None


def lp_rum_lum_rp(x, y, phi) -> Optional[Tuple[float, float, float]]:
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho = (20.0 - xi * xi - eta * eta) / 16.0
    if 0.0 <= rho <= 1.0:
        u = -math.acos(rho)
        if u >= -HALF_PI:
            t, v = tau_omega(u, u, xi, eta, phi)
            if t >= -ZERO and v >= -ZERO:
                return t, u, v
    return None


def lp_rm_sm_lm(x, y, phi) -> Optional[Tuple[float, float, float]]:
    xi = x - math.sin(phi)
    eta = y - 1.0 + math.cos(phi)
    rho, theta = polar(xi, eta)
    if rho >= 2.0:
        r = math.sqrt(rho * rho - 4.0)
        u = 2.0 - r
        t = mod2pi(theta + math.atan2(r, -2.0))
        v = mod2pi(phi - HALF_PI - t)
        if t >= -ZERO and u <= ZERO and v <= ZERO:
            return t, u, v
    return None


def lp_rm_sm_rm(x, y, phi) -> Optional[Tuple[float, float, float]]:
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho, theta = polar(-eta, xi)
    if rho >= 2.0:
        t = theta
        u = 2.0 - rho
        v = mod2pi(t + HALF_PI - phi)
        if t >= -ZERO and u <= ZERO and v <= ZERO:
            return t, u, v
    return None


def lp_rm_s_lm_rp(x, y, phi) -> Optional[Tuple[float, float, float]]:
    xi = x + math.sin(phi)
    eta = y - 1.0 - math.cos(phi)
    rho, _ = polar(xi, eta)
    if rho >= 2.0:
        u = 4.0 - math.sqrt(rho * rho - 4.0)
        if u <= ZERO:
            t = mod2pi(math.atan2((4.0 - u) * xi - 2.0 * eta, -2.0 * xi + (u - 4.0) * eta))
            v = mod2pi(t - phi)
            if t >= -ZERO and v >= -ZERO:
                return t, u, v
    return None


# Families: yield (word index, signed values) in a fixed order

def _variants(x, y, phi):
    """(goal args, sign, reflected) for the plain, time-flipped, reflected and both variants."""
    yield (x, y, phi), 1.0, False
    yield (-x, y, -phi), -1.0, False
    yield (x, -y, -phi), 1.0, True
    yield (-x, -y, phi), -1.0, True


def csc(x, y, phi) -> Iterator[Candidate]:
    for args, sign, reflected in _variants(x, y, phi):
        found = lp_sp_lp(*args)
        if found:
            yield (15 if reflected else 14), tuple(sign * v for v in found)
    for args, sign, reflected in _variants(x, y, phi):
        found = lp_sp_rp(*args)
        if found:
            yield (13 if reflected else 12), tuple(sign * v for v in found)


def _backwards(x, y, phi) -> Tuple[float, float]:
    return x * math.cos(phi) + y * math.sin(phi), x * math.sin(phi) - y * math.cos(phi)


def ccc(x, y, phi) -> Iterator[Candidate]:
    for args, sign, reflected in _variants(x, y, phi):
        found = lp_rm_l(*args)
        if found:
            t, u, v = found
            yield (1 if reflected else 0), (sign * t, sign * u, sign * v)
    xb, yb = _backwards(x, y, phi)
    for args, sign, reflected in _variants(xb, yb, phi):
        found = lp_rm_l(*args)
        if found:
            t, u, v = found
            yield (1 if reflected else 0), (sign * v, sign * u, sign * t)


def cccc(x, y, phi) -> Iterator[Candidate]:
    for args, sign, reflected in _variants(x, y, phi):
        found = lp_rup_lum_rm(*args)
        if found:
            t, u, v = found
            yield (3 if reflected else 2), (sign * t, sign * u, -sign * u, sign * v)
    for args, sign, reflected in _variants(x, y, phi):
        found = lp_rum_lum_rp(*args)
        if found:
            t, u, v = found
            yield (3 if reflected else 2), (sign * t, sign * u, sign * u, sign * v)


def ccsc(x, y, phi) -> Iterator[Candidate]:
    for formula, words in ((lp_rm_sm_lm, (4, 5)), (lp_rm_sm_rm, (8, 9))):
        for args, sign, reflected in _variants(x, y, phi):
            found = formula(*args)
            if found:
                t, u, v = found
                yield words[reflected], (sign * t, -sign * HALF_PI, sign * u, sign * v)
    xb, yb = _backwards(x, y, phi)
    for formula, words in ((lp_rm_sm_lm, (6, 7)), (lp_rm_sm_rm, (10, 11))):
        for args, sign, reflected in _variants(xb, yb, phi):
            found = formula(*args)
            if found:
                t, u, v = found
                yield words[reflected], (sign * v, sign * u, -sign * HALF_PI, sign * t)


def ccscc(x, y, phi) -> Iterator[Candidate]:
    for args, sign, reflected in _variants(x, y, phi):
        found = lp_rm_s_lm_rp(*args)
        if found:
            t, u, v = found
            yield (17 if reflected else 16), (sign * t, -sign * HALF_PI, sign * u, -sign * HALF_PI, sign * v)


FAMILIES = (csc, ccc, cccc, ccsc, ccscc)


def candidates(x: float, y: float, phi: float) -> Iterator[Candidate]:
    """Every valid word for a normalized goal, in family order."""
    for family in FAMILIES:
        yield from family(x, y, phi)
