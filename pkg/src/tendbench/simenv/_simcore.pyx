# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled contact/stepping kernel.

Mirror of ``_simcore_py`` — same expressions in the same order so both
backends produce bit-identical state streams.  Keep edits synchronized.
"""

from libc.math cimport acos, fabs, pi, sqrt, tanh


cdef double _segment_area(double radius, double h) noexcept:
    if h >= radius:
        return 0.0
    if h <= -radius:
        return pi * radius * radius
    return radius * radius * acos(h / radius) - h * sqrt(radius * radius - h * h)


cdef double _segment_moment(double radius, double h) noexcept:
    cdef double s
    if h >= radius:
        return 0.0
    if h <= -radius:
        return 0.0
    s = radius * radius - h * h
    return (2.0 / 3.0) * s * sqrt(s)


cdef int _contact(const double* par, double px, double py, double pz,
                  double vx, double vy, double vz, double* out) noexcept:
    cdef double hx = par[0]
    cdef double hy = par[1]
    cdef double hz = par[2]
    cdef double r_h = par[3]
    cdef double r_p = par[4]
    cdef double r_o = par[5]
    cdef double c_d = par[6]
    cdef double sin_t = par[7]
    cdef double cos_t = par[8]
    cdef double tan_t = par[9]
    cdef double hole_depth = par[10]
    cdef double k_n = par[13]
    cdef double d_n = par[14]
    cdef double mu = par[15]
    cdef double sat_limit = par[21]
    cdef double v_eps = par[22]

    cdef double x = px - hx
    cdef double y = py - hy
    cdef double z = pz - hz

    cdef double fx = 0.0, fy = 0.0, fz = 0.0
    cdef double tx = 0.0, ty = 0.0, tz = 0.0
    cdef double e, ex, ey, pen, rate, mag, s, fr
    cdef double x0, h1, a1, m1, a2, m2, disc_area, lens_area, flat_area, lens_moment, cen
    cdef double nfx, nfy, nfz, armx, army, armz
    cdef double rho, z_surf, nx, ny, nz, vn, vtx, vty, vtz
    cdef double fmag, scale
    cdef int sat = 0

    out[0] = 0.0
    out[1] = 0.0
    out[2] = 0.0
    out[3] = 0.0
    out[4] = 0.0
    out[5] = 0.0

    if z <= 0.0:
        return 0

    e = sqrt(x * x + y * y)
    if e > 1e-12:
        ex = x / e
        ey = y / e
    else:
        ex = 0.0
        ey = 0.0

    # flat top
    if e + r_p > r_o and e > 1e-12:
        pen = z
        rate = -vz
        mag = k_n * pen - d_n * rate
        if mag > 0.0:
            x0 = (e * e + r_o * r_o - r_p * r_p) / (2.0 * e)
            h1 = x0 - e
            a1 = _segment_area(r_p, h1)
            m1 = _segment_moment(r_p, h1)
            a2 = _segment_area(r_o, x0)
            m2 = _segment_moment(r_o, x0)
            disc_area = pi * r_p * r_p
            lens_area = disc_area - a1 + a2
            flat_area = disc_area - lens_area
            if flat_area > 1e-12:
                lens_moment = e * disc_area - e * a1 - m1 + m2
                cen = (e * disc_area - lens_moment) / flat_area
            else:
                cen = e
            nfx = 0.0
            nfy = 0.0
            nfz = -mag
            s = sqrt(vx * vx + vy * vy)
            if s > 1e-12:
                fr = mu * mag * tanh(s / v_eps)
                nfx -= fr * vx / s
                nfy -= fr * vy / s
            armx = cen * ex - x
            army = cen * ey - y
            fx += nfx
            fy += nfy
            fz += nfz
            tx += army * nfz
            ty += -armx * nfz
            tz += armx * nfy - army * nfx

    # chamfer band: rim-edge-on-cone contact, active only while the deepest
    # rim point lies inside the band (beyond it the flat face carries the peg)
    if z <= c_d and r_h < e + r_p and e + r_p <= r_o:
        rho = e + r_p
        z_surf = (r_o - rho) * tan_t
        pen = (z - z_surf) * cos_t
        if pen > 0.0:
            nx = -sin_t * ex
            ny = -sin_t * ey
            nz = -cos_t
            vn = vx * nx + vy * ny + vz * nz
            mag = k_n * pen - d_n * vn
            if mag > 0.0:
                nfx = mag * nx
                nfy = mag * ny
                nfz = mag * nz
                vtx = vx - vn * nx
                vty = vy - vn * ny
                vtz = vz - vn * nz
                s = sqrt(vtx * vtx + vty * vty + vtz * vtz)
                if s > 1e-12:
                    fr = mu * mag * tanh(s / v_eps)
                    nfx -= fr * vtx / s
                    nfy -= fr * vty / s
                    nfz -= fr * vtz / s
                armx = rho * ex - x
                army = rho * ey - y
                fx += nfx
                fy += nfy
                fz += nfz
                tx += army * nfz
                ty += -armx * nfz
                tz += armx * nfy - army * nfx

    # bore wall below the chamfer (peg must straddle the bore radius)
    if z > c_d and e + r_p > r_h and e - r_p < r_h:
        pen = e + r_p - r_h
        nx = -ex
        ny = -ey
        vn = vx * nx + vy * ny
        mag = k_n * pen - d_n * vn
        if mag > 0.0:
            nfx = mag * nx
            nfy = mag * ny
            nfz = 0.0
            vtx = vx - vn * nx
            vty = vy - vn * ny
            vtz = vz
            s = sqrt(vtx * vtx + vty * vty + vtz * vtz)
            if s > 1e-12:
                fr = mu * mag * tanh(s / v_eps)
                nfx -= fr * vtx / s
                nfy -= fr * vty / s
                nfz -= fr * vtz / s
            armx = (e + r_p) * ex - x
            army = (e + r_p) * ey - y
            armz = (c_d + z) / 2.0 - z
            fx += nfx
            fy += nfy
            fz += nfz
            tx += army * nfz - armz * nfy
            ty += armz * nfx - armx * nfz
            tz += armx * nfy - army * nfx

    # hole bottom
    if z > hole_depth:
        pen = z - hole_depth
        rate = -vz
        mag = k_n * pen - d_n * rate
        if mag > 0.0:
            fz += -mag
            s = sqrt(vx * vx + vy * vy)
            if s > 1e-12:
                fr = mu * mag * tanh(s / v_eps)
                fx -= fr * vx / s
                fy -= fr * vy / s

    fmag = sqrt(fx * fx + fy * fy + fz * fz)
    if fmag > sat_limit:
        scale = sat_limit / fmag
        fx *= scale
        fy *= scale
        fz *= scale
        tx *= scale
        ty *= scale
        tz *= scale
        sat = 1
    out[0] = fx
    out[1] = fy
    out[2] = fz
    out[3] = tx
    out[4] = ty
    out[5] = tz
    return sat


def contact_eval(const double[::1] par, double px, double py, double pz,
                 double vx, double vy, double vz):
    cdef double out[6]
    cdef int sat = _contact(&par[0], px, py, pz, vx, vy, vz, out)
    return out[0], out[1], out[2], out[3], out[4], out[5], sat


def step_n(const double[::1] par, double[::1] state, const double[::1] wp, const double[::1] fdes,
           const double[::1] mode, const double[::1] gain, const double[::1] qd_max,
           const double[::1] q_min, const double[::1] q_max, double guard, int n):
    cdef double hx = par[0]
    cdef double hy = par[1]
    cdef double hz = par[2]
    cdef double success_depth = par[11]
    cdef double clearance = par[12]
    cdef double k_lat = par[16]
    cdef double k_ax = par[17]
    cdef double b_damp = par[18]
    cdef double dt = par[19]
    cdef double alpha = par[20]

    cdef double cw[6]
    cdef int it, i, sat
    cdef bint guard_ok
    cdef double gmax, limit, stepv, v, pos
    cdef double sx, sy, sz, vx, vy, vz
    cdef double amax, depth, lat

    for it in range(n):
        guard_ok = True
        if guard > 0.0:
            gmax = fabs(state[15])
            if fabs(state[16]) > gmax:
                gmax = fabs(state[16])
            if fabs(state[17]) > gmax:
                gmax = fabs(state[17])
            if gmax > guard:
                guard_ok = False
        for i in range(3):
            limit = qd_max[i] * dt
            if mode[i] == 0.0:
                stepv = wp[i] - state[6 + i]
                if not guard_ok:
                    stepv = 0.0
                if stepv > limit:
                    stepv = limit
                elif stepv < -limit:
                    stepv = -limit
            else:
                v = gain[i] * (fdes[i] - state[15 + i])
                if v > qd_max[i]:
                    v = qd_max[i]
                elif v < -qd_max[i]:
                    v = -qd_max[i]
                stepv = v * dt
            pos = state[6 + i] + stepv
            if pos > q_max[i]:
                pos = q_max[i]
            elif pos < q_min[i]:
                pos = q_min[i]
            state[6 + i] = pos

        sat = _contact(&par[0], state[0], state[1], state[2],
                       state[3], state[4], state[5], cw)
        if sat:
            state[23] = 1.0

        sx = k_lat * (state[6] - state[0])
        sy = k_lat * (state[7] - state[1])
        sz = k_ax * (state[8] - state[2])
        vx = (sx + cw[0]) / b_damp
        vy = (sy + cw[1]) / b_damp
        vz = (sz + cw[2]) / b_damp
        state[3] = vx
        state[4] = vy
        state[5] = vz
        state[0] += vx * dt
        state[1] += vy * dt
        state[2] += vz * dt

        state[9] = sx
        state[10] = sy
        state[11] = sz
        state[12] = -cw[3]
        state[13] = -cw[4]
        state[14] = -cw[5]

        for i in range(6):
            state[15 + i] += alpha * (state[9 + i] - state[15 + i])

        amax = fabs(sx)
        if fabs(sy) > amax:
            amax = fabs(sy)
        if fabs(sz) > amax:
            amax = fabs(sz)
        if amax > state[21]:
            state[21] = amax

        # success test on the rigid projection: below the chamfer a rigid peg
        # inside the bore cannot exceed the clearance; any excess lateral
        # offset there is penalty-method interpenetration, not position
        depth = state[2] - hz
        lat = sqrt((state[0] - hx) * (state[0] - hx) + (state[1] - hy) * (state[1] - hy))
        if depth > par[6] and lat + par[4] > par[3] and lat - par[4] < par[3]:
            if lat > clearance:
                lat = clearance
        if depth >= success_depth and lat <= clearance:
            state[24] = 1.0

        state[22] += 1.0
