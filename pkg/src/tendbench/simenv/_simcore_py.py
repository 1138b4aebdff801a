"""Pure-Python contact/stepping kernel.

Fallback twin of the compiled extension ``_simcore``.  Both implementations
evaluate the same double-precision expressions in the same order, so the two
backends produce bit-identical state streams; keep any edit mirrored in
``_simcore.pyx``.

Parameter vector layout (see ``SceneConfig.pack_params``):
  0..2  hole center (x, y, z); surface plane at z = hole_z
  3     hole radius          4   peg radius
  5     chamfer outer radius 6   chamfer depth
  7     sin(chamfer angle)   8   cos(chamfer angle)   9  tan(chamfer angle)
  10    hole depth           11  success depth        12 radial clearance
  13    contact stiffness    14  contact damping      15 friction mu
  16    cup lateral stiffness 17 cup axial stiffness  18 peg damping
  19    physics dt           20  filter alpha
  21    force saturation     22  friction velocity knee

State vector layout:
  0..2   peg position        3..5   peg velocity
  6..8   ee command position
  9..11  raw sensed force    12..14 raw sensed torque
  15..20 filtered wrench (6)
  21     max abs force seen  22     step count
  23     saturation latch    24     success latch
"""

from math import acos, pi, sqrt, tanh

BACKEND_NAME = "pure"


def _segment_area(radius, h):
    # area of {x > h} slice of a radius-`radius` disc centered at x = 0
    if h >= radius:
        return 0.0
    if h <= -radius:
        return pi * radius * radius
    return radius * radius * acos(h / radius) - h * sqrt(radius * radius - h * h)


def _segment_moment(radius, h):
    # first moment (about the disc center) of the same slice
    if h >= radius:
        return 0.0
    if h <= -radius:
        return 0.0
    s = radius * radius - h * h
    return (2.0 / 3.0) * s * sqrt(s)


def contact_eval(par, px, py, pz, vx, vy, vz):
    """Contact wrench acting on the peg, torque about the peg bottom center.

    Case decomposition over the piecewise environment (flat top, chamfer
    band, bore wall, hole bottom); each active regime contributes a
    max-penetration spring-damper normal plus regularized Coulomb friction.
    Returns (fx, fy, fz, tx, ty, tz, saturated).
    """
    hx = par[0]
    hy = par[1]
    hz = par[2]
    r_h = par[3]
    r_p = par[4]
    r_o = par[5]
    c_d = par[6]
    sin_t = par[7]
    cos_t = par[8]
    tan_t = par[9]
    hole_depth = par[10]
    k_n = par[13]
    d_n = par[14]
    mu = par[15]
    sat_limit = par[21]
    v_eps = par[22]

    x = px - hx
    y = py - hy
    z = pz - hz

    fx = 0.0
    fy = 0.0
    fz = 0.0
    tx = 0.0
    ty = 0.0
    tz = 0.0

    if z <= 0.0:
        return 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0

    e = sqrt(x * x + y * y)
    if e > 1e-12:
        ex = x / e
        ey = y / e
    else:
        ex = 0.0
        ey = 0.0

    # flat top: some of the disc rests outside the chamfered opening
    if e + r_p > r_o and e > 1e-12:
        pen = z
        rate = -vz  # separation-positive convention; pressing in adds force
        mag = k_n * pen - d_n * rate
        if mag > 0.0:
            # crescent centroid via the two-circle lens closed form
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
            # friction opposes lateral slip at the same contact patch
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
    if z <= c_d and r_h < e + r_p <= r_o:
        rho = e + r_p
        z_surf = (r_o - rho) * tan_t
        pen = (z - z_surf) * cos_t
        if pen > 0.0:
            nx = -sin_t * ex
            ny = -sin_t * ey
            nz = -cos_t
            vn = vx * nx + vy * ny + vz * nz  # separation rate along the normal
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

    # hole bottom: full-disc support, zero lever arm
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

    sat = 0
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
    return fx, fy, fz, tx, ty, tz, sat


def step_n(par, state, wp, fdes, mode, gain, qd_max, q_min, q_max, guard, n):
    """Advance the plant `n` physics substeps, mutating `state` in place.

    Per axis i, mode[i] selects the EE-command update: 0 tracks waypoint
    wp[i] at a clamped rate (halted while the filtered force exceeds
    `guard`, if guard > 0); 1 integrates the admittance law
    gain[i] * (fdes[i] - filtered[i]).  The peg then follows overdamped
    quasi-static dynamics under the cup spring and contact forces.
    """
    hx = par[0]
    hy = par[1]
    hz = par[2]
    success_depth = par[11]
    clearance = par[12]
    k_lat = par[16]
    k_ax = par[17]
    b_damp = par[18]
    dt = par[19]
    alpha = par[20]

    for _ in range(n):
        # EE command update
        guard_ok = True
        if guard > 0.0:
            gmax = abs(state[15])
            if abs(state[16]) > gmax:
                gmax = abs(state[16])
            if abs(state[17]) > gmax:
                gmax = abs(state[17])
            if gmax > guard:
                guard_ok = False
        for i in range(3):
            limit = qd_max[i] * dt
            if mode[i] == 0.0:
                step = wp[i] - state[6 + i]
                if not guard_ok:
                    step = 0.0
                if step > limit:
                    step = limit
                elif step < -limit:
                    step = -limit
            else:
                v = gain[i] * (fdes[i] - state[15 + i])
                if v > qd_max[i]:
                    v = qd_max[i]
                elif v < -qd_max[i]:
                    v = -qd_max[i]
                step = v * dt
            pos = state[6 + i] + step
            if pos > q_max[i]:
                pos = q_max[i]
            elif pos < q_min[i]:
                pos = q_min[i]
            state[6 + i] = pos

        # contact at the current peg state
        cfx, cfy, cfz, ctx, cty, ctz, sat = contact_eval(
            par, state[0], state[1], state[2], state[3], state[4], state[5]
        )
        if sat:
            state[23] = 1.0

        # cup spring force on the peg, overdamped integration
        sx = k_lat * (state[6] - state[0])
        sy = k_lat * (state[7] - state[1])
        sz = k_ax * (state[8] - state[2])
        vx = (sx + cfx) / b_damp
        vy = (sy + cfy) / b_damp
        vz = (sz + cfz) / b_damp
        state[3] = vx
        state[4] = vy
        state[5] = vz
        state[0] += vx * dt
        state[1] += vy * dt
        state[2] += vz * dt

        # sensed wrench: the cup spring force that drove this substep
        # (exerted-on-env convention), contact torque reaction
        state[9] = sx
        state[10] = sy
        state[11] = sz
        state[12] = -ctx
        state[13] = -cty
        state[14] = -ctz

        # first-order low-pass on all six channels
        for i in range(6):
            state[15 + i] += alpha * (state[9 + i] - state[15 + i])

        amax = abs(sx)
        if abs(sy) > amax:
            amax = abs(sy)
        if abs(sz) > amax:
            amax = abs(sz)
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
