"""Hot numeric kernels: physics steps, network activation, fused episode loops.

Everything here is plain scalar/array code decorated with :func:`neatlab.accel.jit`,
so it runs either numba-compiled (default) or as pure Python/NumPy
(``NEATLAB_NUMBA=0``). Kernels are allocation-light and release the GIL under
numba, which is what lets episode evaluation scale across threads.

Only initial conditions are random; they are drawn *outside* the kernels (see
:mod:`neatlab.envs`), so kernels are pure functions of their float inputs.
"""

import math

import numpy as np

from .accel import jit

# --- acrobot constants (classical two-link underactuated pendulum) ----------
ACRO_M1 = 1.0       # link masses
ACRO_M2 = 1.0
ACRO_L1 = 1.0       # link lengths
ACRO_LC1 = 0.5      # centres of mass
ACRO_LC2 = 0.5
ACRO_I1 = 1.0       # link moments of inertia
ACRO_I2 = 1.0
ACRO_G = 9.8
ACRO_DT = 0.2       # one RK4 step per control step
ACRO_MAX_W1 = 4.0 * math.pi
ACRO_MAX_W2 = 9.0 * math.pi
ACRO_STEP_REWARD = -1.0
ACRO_DONE_HEIGHT = 1.0   # done when -cos(th1) - cos(th1+th2) exceeds this

# --- lunar-lander-lite constants table ---------------------------------------
# Simplified planar rigid-body substitute for the Box2D lander. All values are
# part of this artifact's contract, chosen so a gentle powered descent from the
# start box is comfortably achievable (thrust-to-weight 2.5, ~20 s of sim time).
LUNAR_GRAVITY = -1.6        # vertical acceleration, m/s^2
LUNAR_DT = 0.05             # control-step duration, s
LUNAR_MAIN_ACCEL = 4.0      # body-frame-up acceleration at full main throttle
LUNAR_SIDE_ACCEL = 0.8      # body-frame lateral acceleration at full side throttle
LUNAR_SIDE_TORQUE = 2.0     # angular acceleration per unit side throttle
LUNAR_SIDE_DEADZONE = 0.5   # |a1| must exceed this for the side engine to fire
LUNAR_PAD_HALFWIDTH = 0.2   # landings with |x| inside this earn the bonus
LUNAR_CRASH_SPEED = 0.35    # impact speed above this destroys the lander
LUNAR_CRASH_TILT = math.pi / 2.0   # |theta| beyond this is a crash anywhere
LUNAR_LEVEL_TILT = 0.05     # |theta| below this counts as level (both legs)
LUNAR_REST_SPEED = 0.05     # grounded speed below this counts as at rest
LUNAR_GROUND_FRICTION = 0.7  # per-step horizontal velocity retention on ground
LUNAR_TILT_SETTLE = 0.5     # per-step tilt retention while grounded
LUNAR_X_LIMIT = 2.0         # leaving |x| > limit aborts the episode as a crash
LUNAR_Y_LIMIT = 3.0
LUNAR_FUEL_MAIN = 0.3       # reward cost per unit main throttle per step
LUNAR_FUEL_SIDE = 0.03      # reward cost per unit side throttle per step
LUNAR_SHAPE_DIST = 100.0    # shaping potential weights
LUNAR_SHAPE_SPEED = 100.0
LUNAR_SHAPE_TILT = 100.0
LUNAR_SHAPE_CONTACT = 10.0
LUNAR_LANDED_BONUS = 100.0
LUNAR_CRASH_PENALTY = -100.0
LUNAR_INIT_X_MIN = 0.25     # |start x| drawn uniform in [min, max]: never over the pad,
LUNAR_INIT_X_MAX = 0.8      # so reaching it requires controlled lateral flight
LUNAR_INIT_Y = 1.2
LUNAR_INIT_V = 0.1          # start vx, vy drawn uniform in +/- this


# =============================================================================
# network activation
# =============================================================================

@jit
def feedforward_values(values, n_inputs, comp_slots, in_ptr, in_src, in_w, bias, x):
    """One stateless pass: write inputs, then tanh(bias + sum w*src) in topo order."""
    for i in range(n_inputs):
        values[i] = x[i]
    for k in range(comp_slots.shape[0]):
        s = bias[k]
        for e in range(in_ptr[k], in_ptr[k + 1]):
            s += in_w[e] * values[in_src[e]]
        values[comp_slots[k]] = math.tanh(s)


@jit
def recurrent_values(state, new_state, n_inputs, comp_slots, in_ptr, in_src, in_w, bias, x):
    """One synchronous step: every node reads the previous step's values.

    Input slots carry the *current* inputs; all other sources are read from
    ``state`` (the previous step) while results are written to ``new_state``.
    """
    for i in range(n_inputs):
        state[i] = x[i]
        new_state[i] = x[i]
    for k in range(comp_slots.shape[0]):
        s = bias[k]
        for e in range(in_ptr[k], in_ptr[k + 1]):
            s += in_w[e] * state[in_src[e]]
        new_state[comp_slots[k]] = math.tanh(s)


# =============================================================================
# acrobot
# =============================================================================

@jit
def acrobot_dsdt(th1, th2, w1, w2, torque):
    """Equations of motion for the torque-actuated two-link pendulum."""
    d1 = (ACRO_M1 * ACRO_LC1 ** 2
          + ACRO_M2 * (ACRO_L1 ** 2 + ACRO_LC2 ** 2 + 2.0 * ACRO_L1 * ACRO_LC2 * math.cos(th2))
          + ACRO_I1 + ACRO_I2)
    d2 = ACRO_M2 * (ACRO_LC2 ** 2 + ACRO_L1 * ACRO_LC2 * math.cos(th2)) + ACRO_I2
    phi2 = ACRO_M2 * ACRO_LC2 * ACRO_G * math.cos(th1 + th2 - math.pi / 2.0)
    phi1 = (-ACRO_M2 * ACRO_L1 * ACRO_LC2 * w2 ** 2 * math.sin(th2)
            - 2.0 * ACRO_M2 * ACRO_L1 * ACRO_LC2 * w2 * w1 * math.sin(th2)
            + (ACRO_M1 * ACRO_LC1 + ACRO_M2 * ACRO_L1) * ACRO_G * math.cos(th1 - math.pi / 2.0)
            + phi2)
    a2 = ((torque + d2 / d1 * phi1
           - ACRO_M2 * ACRO_L1 * ACRO_LC2 * w1 ** 2 * math.sin(th2) - phi2)
          / (ACRO_M2 * ACRO_LC2 ** 2 + ACRO_I2 - d2 ** 2 / d1))
    a1 = -(d2 * a2 + phi1) / d1
    return w1, w2, a1, a2


@jit
def _wrap_pi(x):
    return ((x + math.pi) % (2.0 * math.pi)) - math.pi


@jit
def acrobot_rk4_step(th1, th2, w1, w2, torque):
    """Integrate one control step (RK4, constant torque), then wrap and clamp."""
    dt = ACRO_DT
    k1a, k1b, k1c, k1d = acrobot_dsdt(th1, th2, w1, w2, torque)
    k2a, k2b, k2c, k2d = acrobot_dsdt(th1 + 0.5 * dt * k1a, th2 + 0.5 * dt * k1b,
                                      w1 + 0.5 * dt * k1c, w2 + 0.5 * dt * k1d, torque)
    k3a, k3b, k3c, k3d = acrobot_dsdt(th1 + 0.5 * dt * k2a, th2 + 0.5 * dt * k2b,
                                      w1 + 0.5 * dt * k2c, w2 + 0.5 * dt * k2d, torque)
    k4a, k4b, k4c, k4d = acrobot_dsdt(th1 + dt * k3a, th2 + dt * k3b,
                                      w1 + dt * k3c, w2 + dt * k3d, torque)
    th1 = th1 + dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
    th2 = th2 + dt / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
    w1 = w1 + dt / 6.0 * (k1c + 2.0 * k2c + 2.0 * k3c + k4c)
    w2 = w2 + dt / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
    th1 = _wrap_pi(th1)
    th2 = _wrap_pi(th2)
    w1 = min(max(w1, -ACRO_MAX_W1), ACRO_MAX_W1)
    w2 = min(max(w2, -ACRO_MAX_W2), ACRO_MAX_W2)
    return th1, th2, w1, w2


@jit
def acrobot_step_core(th1, th2, w1, w2, torque):
    """(state, torque) -> (state', reward, done). Reward is -1 on every step."""
    th1, th2, w1, w2 = acrobot_rk4_step(th1, th2, w1, w2, torque)
    done = (-math.cos(th1) - math.cos(th1 + th2)) > ACRO_DONE_HEIGHT
    return th1, th2, w1, w2, ACRO_STEP_REWARD, done


@jit
def acrobot_episode(th1, th2, w1, w2, max_steps,
                    n_nodes, n_inputs, comp_slots, in_ptr, in_src, in_w, bias, out_slots):
    """Roll out one acrobot episode with a recurrent controller.

    The single actuator's torque is argmax over the 3 output nodes minus 1
    (ties resolve to the lowest index). Returns (total_reward, steps,
    total |torque| applied).
    """
    prev = np.zeros(n_nodes, dtype=np.float64)
    cur = np.zeros(n_nodes, dtype=np.float64)
    obs = np.empty(6, dtype=np.float64)
    total = 0.0
    abs_torque = 0.0
    steps = 0
    for _t in range(max_steps):
        obs[0] = math.cos(th1)
        obs[1] = math.sin(th1)
        obs[2] = math.cos(th2)
        obs[3] = math.sin(th2)
        obs[4] = w1
        obs[5] = w2
        recurrent_values(prev, cur, n_inputs, comp_slots, in_ptr, in_src, in_w, bias, obs)
        best = cur[out_slots[0]]
        bi = 0
        for i in range(1, out_slots.shape[0]):
            v = cur[out_slots[i]]
            if v > best:
                best = v
                bi = i
        torque = float(bi - 1)
        th1, th2, w1, w2, r, done = acrobot_step_core(th1, th2, w1, w2, torque)
        total += r
        abs_torque += abs(torque)
        steps += 1
        tmp = prev
        prev = cur
        cur = tmp
        if done:
            break
    return total, steps, abs_torque


# =============================================================================
# lunar-lander-lite
# =============================================================================

@jit
def lunar_phi(x, y, vx, vy, th, cl, cr):
    """Shaping potential: closer, slower, more level and in contact is better."""
    dist = math.sqrt(x * x + y * y)
    speed = math.sqrt(vx * vx + vy * vy)
    return (-LUNAR_SHAPE_DIST * dist
            - LUNAR_SHAPE_SPEED * speed
            - LUNAR_SHAPE_TILT * abs(th)
            + LUNAR_SHAPE_CONTACT * (cl + cr))


@jit
def lunar_step_core(x, y, vx, vy, th, om, cl, cr, a0, a1, fuel_main, fuel_side):
    """One control step of the simplified lander.

    Returns (x, y, vx, vy, th, om, cl, cr, reward, done) with done codes
    0 = running, 1 = landed on pad (+bonus), 2 = crash (-penalty),
    3 = at rest off the pad (no bonus).
    """
    phi_before = lunar_phi(x, y, vx, vy, th, cl, cr)
    main = max(a0, 0.0)
    side = a1 if abs(a1) > LUNAR_SIDE_DEADZONE else 0.0

    ax = -math.sin(th) * LUNAR_MAIN_ACCEL * main + math.cos(th) * LUNAR_SIDE_ACCEL * side
    ay = math.cos(th) * LUNAR_MAIN_ACCEL * main + math.sin(th) * LUNAR_SIDE_ACCEL * side + LUNAR_GRAVITY
    vx += ax * LUNAR_DT
    vy += ay * LUNAR_DT
    x += vx * LUNAR_DT
    y += vy * LUNAR_DT
    om += -side * LUNAR_SIDE_TORQUE * LUNAR_DT
    th += om * LUNAR_DT

    was_grounded = (cl + cr) > 0.5
    done = 0
    terminal = 0.0
    if abs(th) > LUNAR_CRASH_TILT or abs(x) > LUNAR_X_LIMIT or y > LUNAR_Y_LIMIT:
        done = 2
        terminal = LUNAR_CRASH_PENALTY
        cl = 0.0
        cr = 0.0
    elif y <= 0.0:
        impact = math.sqrt(vx * vx + vy * vy)
        if (not was_grounded) and impact > LUNAR_CRASH_SPEED:
            done = 2
            terminal = LUNAR_CRASH_PENALTY
            y = 0.0
        else:
            y = 0.0
            if vy < 0.0:
                vy = 0.0
            vx *= LUNAR_GROUND_FRICTION
            om = 0.0
            th *= LUNAR_TILT_SETTLE
            if abs(th) <= LUNAR_LEVEL_TILT:
                cl = 1.0
                cr = 1.0
            elif th > 0.0:
                cl = 1.0
                cr = 0.0
            else:
                cl = 0.0
                cr = 1.0
            if math.sqrt(vx * vx + vy * vy) <= LUNAR_REST_SPEED and abs(th) <= LUNAR_LEVEL_TILT:
                if abs(x) <= LUNAR_PAD_HALFWIDTH:
                    done = 1
                    terminal = LUNAR_LANDED_BONUS
                else:
                    done = 3
    else:
        cl = 0.0
        cr = 0.0

    phi_after = lunar_phi(x, y, vx, vy, th, cl, cr)
    reward = (phi_after - phi_before) - fuel_main * main - fuel_side * abs(side) + terminal
    return x, y, vx, vy, th, om, cl, cr, reward, done


@jit
def lunar_episode(x, y, vx, vy, max_steps, fuel_main, fuel_side,
                  n_nodes, n_inputs, comp_slots, in_ptr, in_src, in_w, bias, out_slots):
    """Roll out one lander episode with a feedforward controller.

    Output 0 is the main-engine command, output 1 the side command. Returns
    (total_reward, steps, total effective main throttle, total |effective side|).
    """
    values = np.zeros(n_nodes, dtype=np.float64)
    obs = np.empty(8, dtype=np.float64)
    th = 0.0
    om = 0.0
    cl = 0.0
    cr = 0.0
    total = 0.0
    abs_main = 0.0
    abs_side = 0.0
    steps = 0
    for _t in range(max_steps):
        obs[0] = x
        obs[1] = y
        obs[2] = vx
        obs[3] = vy
        obs[4] = th
        obs[5] = om
        obs[6] = cl
        obs[7] = cr
        feedforward_values(values, n_inputs, comp_slots, in_ptr, in_src, in_w, bias, obs)
        a0 = values[out_slots[0]]
        a1 = values[out_slots[1]]
        x, y, vx, vy, th, om, cl, cr, r, done = lunar_step_core(
            x, y, vx, vy, th, om, cl, cr, a0, a1, fuel_main, fuel_side)
        total += r
        abs_main += max(a0, 0.0)
        abs_side += abs(a1) if abs(a1) > LUNAR_SIDE_DEADZONE else 0.0
        steps += 1
        if done != 0:
            break
    return total, steps, abs_main, abs_side


# =============================================================================
# greedy modularity merging
# =============================================================================

@jit
def cnm_merge_path(e, a):
    """Greedy agglomerative merge sequence for modularity maximization.

    ``e`` is the symmetric K x K matrix of edge fractions (``e[i, j]`` =
    between-module edges / L for i != j, ``e[i, i]`` = within-module edges / L)
    and ``a`` the degree fractions d_i / (2L). Both are consumed in place.

    Repeatedly merges the pair with the largest dQ = e_ij - 2 a_i a_j, ties
    going to the lowest (i, j). Returns (merges, qs): the (K-1, 2) merge pairs
    and the modularity after 0..K-1 merges.
    """
    k = e.shape[0]
    alive = np.ones(k, dtype=np.bool_)
    merges = np.empty((k - 1, 2), dtype=np.int64)
    qs = np.empty(k, dtype=np.float64)
    q = 0.0
    for i in range(k):
        q += e[i, i] - a[i] * a[i]
    qs[0] = q
    for step in range(k - 1):
        best_dq = -1.0e300
        bi = -1
        bj = -1
        for i in range(k):
            if not alive[i]:
                continue
            for j in range(i + 1, k):
                if not alive[j]:
                    continue
                dq = e[i, j] - 2.0 * a[i] * a[j]
                if dq > best_dq:
                    best_dq = dq
                    bi = i
                    bj = j
        eij = e[bi, bj]
        old_ii = e[bi, bi]
        old_jj = e[bj, bj]
        for t in range(k):
            if alive[t] and t != bi and t != bj:
                e[bi, t] += e[bj, t]
                e[t, bi] = e[bi, t]
        e[bi, bi] = old_ii + old_jj + eij
        a[bi] += a[bj]
        alive[bj] = False
        q += best_dq
        merges[step, 0] = bi
        merges[step, 1] = bj
        qs[step + 1] = q
    return merges, qs


@jit
def partition_q(adj, deg_frac, assignment):
    """Q of a partition from edge fractions and degree fractions (kernel-side)."""
    n = adj.shape[0]
    q = 0.0
    for u in range(n):
        for v in range(u + 1, n):
            if assignment[u] == assignment[v]:
                q += adj[u, v]
    a = np.zeros(n, dtype=np.float64)
    for v in range(n):
        a[assignment[v]] += deg_frac[v]
    for s in range(n):
        q -= a[s] * a[s]
    return q


@jit
def _move_gain(adj, deg_frac, assignment, a, v, target):
    """dQ of relocating node v into module `target` under the current state."""
    n = adj.shape[0]
    cur = assignment[v]
    e_cur = 0.0
    e_tgt = 0.0
    for u in range(n):
        if u == v:
            continue
        if assignment[u] == cur:
            e_cur += adj[v, u]
        elif assignment[u] == target:
            e_tgt += adj[v, u]
    kv = deg_frac[v]
    return e_tgt - e_cur + 2.0 * kv * (a[cur] - a[target] - kv)


@jit
def refine_partition(adj, deg_frac, assignment):
    """Deterministic local search: single-node moves plus pairwise swaps.

    ``adj[v, u]`` is the edge fraction (edge count between v and u over L) and
    ``deg_frac[v]`` = d_v / (2L). ``assignment`` is modified in place; module
    indices may end up non-contiguous (callers re-canonicalize). Every applied
    change strictly improves Q, so the search terminates. Nodes are scanned in
    index order with ties to the lowest-index target module (a fresh singleton
    considered last); swap sweeps run once single moves are exhausted.
    """
    n = adj.shape[0]
    a = np.zeros(n, dtype=np.float64)       # per-module degree fraction
    size = np.zeros(n, dtype=np.int64)
    for v in range(n):
        a[assignment[v]] += deg_frac[v]
        size[assignment[v]] += 1
    evs = np.zeros(n, dtype=np.float64)     # edge fraction from v into each module
    floor = 1.0e-12                         # strict improvement floor (fp churn guard)
    searching = True
    while searching:
        improved = True
        while improved:
            improved = False
            for v in range(n):
                cur = assignment[v]
                for s in range(n):
                    evs[s] = 0.0
                for u in range(n):
                    if u != v and adj[v, u] > 0.0:
                        evs[assignment[u]] += adj[v, u]
                kv = deg_frac[v]
                best_gain = floor
                best_target = -1
                for t in range(n):
                    if t == cur or size[t] == 0:
                        continue
                    gain = evs[t] - evs[cur] + 2.0 * kv * (a[cur] - a[t] - kv)
                    if gain > best_gain:
                        best_gain = gain
                        best_target = t
                if size[cur] > 1:           # splitting off into a fresh singleton
                    gain = -evs[cur] + 2.0 * kv * (a[cur] - kv)
                    if gain > best_gain:
                        for t in range(n):
                            if size[t] == 0:
                                best_gain = gain
                                best_target = t
                                break
                if best_target >= 0:
                    a[cur] -= kv
                    size[cur] -= 1
                    a[best_target] += kv
                    size[best_target] += 1
                    assignment[v] = best_target
                    improved = True
        # cross-module pair swaps catch rearrangements single moves cannot reach
        searching = False
        for u in range(n):
            for v in range(u + 1, n):
                mu = assignment[u]
                mv = assignment[v]
                if mu == mv:
                    continue
                gain1 = _move_gain(adj, deg_frac, assignment, a, u, mv)
                assignment[u] = mv
                a[mu] -= deg_frac[u]
                a[mv] += deg_frac[u]
                gain2 = _move_gain(adj, deg_frac, assignment, a, v, mu)
                if gain1 + gain2 > floor:
                    assignment[v] = mu
                    a[mv] -= deg_frac[v]
                    a[mu] += deg_frac[v]
                    searching = True        # sizes unchanged by a swap
                else:
                    assignment[u] = mu
                    a[mv] -= deg_frac[u]
                    a[mu] += deg_frac[u]


@jit
def best_refined_partition(adj, deg_frac, init_assignment, merges):
    """Refine every stage of a module merge path; return (best assignment, Q).

    ``merges`` is a merge sequence over the module indices of
    ``init_assignment``. Stage s applies the first s merges and then polishes
    the node-level partition with local moves and swaps. Scanning all stages
    (the start through the all-in-one endpoint) makes the maximizer robust to
    bad early merges while staying fully deterministic.
    """
    n = adj.shape[0]
    k = merges.shape[0] + 1
    module_label = np.arange(k, dtype=np.int64)
    work = np.empty(n, dtype=np.int64)
    best_assign = np.zeros(n, dtype=np.int64)
    best_q = -1.0e300
    for stage in range(k):
        if stage > 0:
            bi = merges[stage - 1, 0]
            bj = merges[stage - 1, 1]
            for t in range(k):
                if module_label[t] == bj:
                    module_label[t] = bi
        for v in range(n):
            work[v] = module_label[init_assignment[v]]
        refine_partition(adj, deg_frac, work)
        q = partition_q(adj, deg_frac, work)
        if q > best_q + 1.0e-12:
            best_q = q
            for v in range(n):
                best_assign[v] = work[v]
    return best_assign, best_q
