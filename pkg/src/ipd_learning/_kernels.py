"""Compiled scalar kernels shared by the equilibrium, field, and integrator code.

Everything here works on raw floats so the same expressions serve three
callers: the public per-point operations, finite-difference stencils (which
must evaluate slightly outside the unit box, hence no clamping of the
stationary coordinates), and the fixed-step trajectory loop.

The x- and y-player expressions are written with mirrored operation order on
purpose: an exactly symmetric state (x_c == y_c, x_d == y_d with equal
learning speeds) then stays bitwise symmetric for the whole trajectory.
fastmath stays off; results must be reproducible bit for bit.
"""

import numpy as np
from numba import njit

# Below this, 1 - (x_c - x_d)(y_c - y_d) is treated as zero and the
# round-to-round chain has no usable stationary law.
DEGENERACY_TOL = 1e-12

# Kernel status codes for trajectory termination.
STATUS_CONVERGED = 0
STATUS_HORIZON = 1
STATUS_DEGENERATE = 2


@njit(cache=True, nogil=True)
def core_values(xc, xd, yc, yd, t, r, p, s):
    """Stationary point, stationary payoffs, and cooperation-defection gaps.

    Returns (ok, x_e, y_e, u_e, v_e, gap_1, gap_2); ok is False when the
    pair is degenerate and the remaining values are meaningless.
    """
    dx = xc - xd
    dy = yc - yd
    denom = 1.0 - dx * dy
    if abs(denom) < DEGENERACY_TOL:
        return False, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0
    xe = (xd + dx * yd) / denom
    ye = (yd + dy * xd) / denom
    ue = ((xe * ye * r + xe * (1.0 - ye) * s) + (1.0 - xe) * ye * t) \
        + (1.0 - xe) * (1.0 - ye) * p
    ve = ((xe * ye * r + (1.0 - xe) * ye * s) + xe * (1.0 - ye) * t) \
        + (1.0 - xe) * (1.0 - ye) * p
    # Gap between cooperating and defecting continuation payoffs, resummed
    # over the geometric echo of one player's deviation.
    gain_x = xe * (r - s) + (1.0 - xe) * (t - p)
    gain_y = ye * (r - s) + (1.0 - ye) * (t - p)
    loss_x = xe * (t - r) + (1.0 - xe) * (p - s)
    loss_y = ye * (t - r) + (1.0 - ye) * (p - s)
    gap1 = (dy * gain_x - loss_y) / denom
    gap2 = (dx * gain_y - loss_x) / denom
    return True, xe, ye, ue, ve, gap1, gap2


@njit(cache=True, nogil=True)
def field_values(xc, xd, yc, yd, t, r, p, s, s1c, s1d, s2c, s2d):
    """Learning vector field (d/dt of x_c, x_d, y_c, y_d). ok mirrors core_values."""
    ok, xe, ye, ue, ve, gap1, gap2 = core_values(xc, xd, yc, yd, t, r, p, s)
    if not ok:
        return False, 0.0, 0.0, 0.0, 0.0
    f0 = s1c * (xc * (1.0 - xc)) * ye * gap1
    f1 = s1d * (xd * (1.0 - xd)) * (1.0 - ye) * gap1
    f2 = s2c * (yc * (1.0 - yc)) * xe * gap2
    f3 = s2d * (yd * (1.0 - yd)) * (1.0 - xe) * gap2
    return True, f0, f1, f2, f3


@njit(cache=True, nogil=True)
def rk4_trajectory(xc, xd, yc, yd,
                   t, r, p, s,
                   s1c, s1d, s2c, s2d,
                   dt, n_steps, converge_tol, stride, band,
                   do_record, times, states, eq_track):
    """Fixed-step RK4 integration of the learning field with post-step clamping.

    States are sampled every `stride` steps (plus the initial and final
    points).  Sampled states also feed the dominance indicator x_e - y_e:
    the kernel tracks whether it ever left the +-band and how often its
    out-of-band sign flipped, so sweeps can classify trajectories without
    storing them.

    Returns (status, n_recorded, final_step,
             xc, xd, yc, yd, had_excursion, n_flips, final_d).
    """
    h2 = 0.5 * dt
    h6 = dt / 6.0
    step = 0
    n_rec = 0
    last_rec_step = -1
    sign_state = 0
    n_flips = 0
    had_exc = False
    final_d = 0.0
    status = STATUS_HORIZON
    xe = 0.0
    ye = 0.0
    ue = 0.0
    ve = 0.0

    while True:
        ok, xe, ye, ue, ve, gap1, gap2 = core_values(xc, xd, yc, yd, t, r, p, s)
        if not ok:
            status = STATUS_DEGENERATE
            break
        final_d = xe - ye
        if step % stride == 0:
            if abs(final_d) > band:
                sgn = 1 if final_d > 0.0 else -1
                had_exc = True
                if sign_state != 0 and sgn != sign_state:
                    n_flips += 1
                sign_state = sgn
            if do_record and n_rec < times.shape[0]:
                times[n_rec] = step * dt
                states[n_rec, 0] = xc
                states[n_rec, 1] = xd
                states[n_rec, 2] = yc
                states[n_rec, 3] = yd
                eq_track[n_rec, 0] = xe
                eq_track[n_rec, 1] = ye
                eq_track[n_rec, 2] = ue
                eq_track[n_rec, 3] = ve
                n_rec += 1
            last_rec_step = step

        f0 = s1c * (xc * (1.0 - xc)) * ye * gap1
        f1 = s1d * (xd * (1.0 - xd)) * (1.0 - ye) * gap1
        f2 = s2c * (yc * (1.0 - yc)) * xe * gap2
        f3 = s2d * (yd * (1.0 - yd)) * (1.0 - xe) * gap2
        m = abs(f0)
        if abs(f1) > m:
            m = abs(f1)
        if abs(f2) > m:
            m = abs(f2)
        if abs(f3) > m:
            m = abs(f3)
        if m < converge_tol:
            status = STATUS_CONVERGED
            break
        if step >= n_steps:
            status = STATUS_HORIZON
            break

        ok, g0, g1, g2, g3 = field_values(
            xc + h2 * f0, xd + h2 * f1, yc + h2 * f2, yd + h2 * f3,
            t, r, p, s, s1c, s1d, s2c, s2d)
        if not ok:
            status = STATUS_DEGENERATE
            break
        ok, q0, q1, q2, q3 = field_values(
            xc + h2 * g0, xd + h2 * g1, yc + h2 * g2, yd + h2 * g3,
            t, r, p, s, s1c, s1d, s2c, s2d)
        if not ok:
            status = STATUS_DEGENERATE
            break
        ok, w0, w1, w2, w3 = field_values(
            xc + dt * q0, xd + dt * q1, yc + dt * q2, yd + dt * q3,
            t, r, p, s, s1c, s1d, s2c, s2d)
        if not ok:
            status = STATUS_DEGENERATE
            break

        xc = xc + h6 * (f0 + 2.0 * g0 + 2.0 * q0 + w0)
        xd = xd + h6 * (f1 + 2.0 * g1 + 2.0 * q1 + w1)
        yc = yc + h6 * (f2 + 2.0 * g2 + 2.0 * q2 + w2)
        yd = yd + h6 * (f3 + 2.0 * g3 + 2.0 * q3 + w3)
        # Strategies are probabilities; clamp the full step back into the box.
        if xc < 0.0:
            xc = 0.0
        elif xc > 1.0:
            xc = 1.0
        if xd < 0.0:
            xd = 0.0
        elif xd > 1.0:
            xd = 1.0
        if yc < 0.0:
            yc = 0.0
        elif yc > 1.0:
            yc = 1.0
        if yd < 0.0:
            yd = 0.0
        elif yd > 1.0:
            yd = 1.0
        step += 1

    if status != STATUS_DEGENERATE and last_rec_step != step:
        if abs(final_d) > band:
            sgn = 1 if final_d > 0.0 else -1
            had_exc = True
            if sign_state != 0 and sgn != sign_state:
                n_flips += 1
            sign_state = sgn
        if do_record and n_rec < times.shape[0]:
            times[n_rec] = step * dt
            states[n_rec, 0] = xc
            states[n_rec, 1] = xd
            states[n_rec, 2] = yc
            states[n_rec, 3] = yd
            eq_track[n_rec, 0] = xe
            eq_track[n_rec, 1] = ye
            eq_track[n_rec, 2] = ue
            eq_track[n_rec, 3] = ve
            n_rec += 1

    return status, n_rec, step, xc, xd, yc, yd, had_exc, n_flips, final_d


def warm_up():
    """Trigger JIT compilation of all kernels (cached across processes)."""
    times = np.zeros(4)
    states = np.zeros((4, 4))
    eq = np.zeros((4, 4))
    core_values(0.9, 0.1, 0.9, 0.1, 5.0, 3.0, 1.0, 0.0)
    field_values(0.9, 0.1, 0.9, 0.1, 5.0, 3.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0)
    rk4_trajectory(0.9, 0.1, 0.9, 0.1, 5.0, 3.0, 1.0, 0.0,
                   1.0, 1.0, 1.0, 1.0,
                   0.01, 2, 1e-10, 1, 0.02,
                   True, times, states, eq)
