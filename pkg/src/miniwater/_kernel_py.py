"""Pure-Python simulation kernel.

Reference implementation of the hot loop: one physics tick, the seeded
per-(tick, sensor) noise stream, and a fused closed-loop rollout (hysteresis
control + physics) used for long normal-operation runs.  The compiled
extension in ``_kernel.pyx`` mirrors this file operation-for-operation; both
must produce bit-identical results (see tests/test_kernel.py and
``python -m miniwater.benchmark``).

Units: volumes in liters, flows in L/s, levels in percent of capacity,
differential pressure in kPa.

Layout conventions shared with the rest of the package:
  sensors   0..7 = LIT101, LIT301, LIT401, FIT101, FIT201, FIT301, FIT401, DPIT301
  actuators 0..8 = MV101, MV201, P101, P102, P301, P302, P401, P601, MCV401
MCV401 is carried as a raw integer position 0..100; all other actuators 0/1.
"""

import math

HAS_C_KERNEL = False

_M64 = (1 << 64) - 1
_TWO_PI = 6.283185307179586476925287
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def _splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return x ^ (x >> 31)


def noise_unit(seed, tick, sensor):
    """Standard normal draw, a pure function of (seed, tick, sensor).

    Counter-style stream: the same coordinates always yield the same draw,
    so stepping is replayable from any starting point.
    """
    h = _splitmix64(_splitmix64(_splitmix64(seed & _M64) ^ (tick & _M64)) ^ sensor)
    a = _splitmix64(h)
    b = _splitmix64(h ^ 0xD1B54A32D192ED03)
    u1 = ((a >> 11) + 1) * _INV_2_53  # (0, 1]
    u2 = (b >> 11) * _INV_2_53  # [0, 1)
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(_TWO_PI * u2)


def tick_physics(
    v101,
    v301,
    v401,
    positions,
    capacity,
    inlet_rate,
    pump_rate,
    drain_capacity,
    return_rate,
    dp_gain,
    noise_sigma,
    dt,
    seed,
    next_tick,
):
    """Advance tank volumes by one tick under the given actuator positions.

    Flow demands are gated by valve/pump positions; outflows are then clamped
    to the volume available at the start of the tick (an empty tank pumps
    nothing), and inflow overflow beyond capacity is discarded as spill.

    Returns (new_volumes, true_readings, reported_readings, spill) where the
    reading tuples follow the sensor layout and the flow entries are the
    realized (post-clamp) values for the tick.
    """
    mv101, mv201, p101, p102, p301, p302, p401, p601, mcv = positions

    f101 = inlet_rate if mv101 else 0.0
    f201 = pump_rate * (p101 + p102) if mv201 else 0.0
    f301 = pump_rate * (p301 + p302)
    f401 = drain_capacity * (mcv / 100.0) if p401 else 0.0
    f601 = return_rate if p601 else 0.0

    # Clamp each tank's outflow to what it held at the start of the tick.
    if f201 * dt > v101:
        f201 = v101 / dt
    if f301 * dt > v301:
        f301 = v301 / dt
    out401 = (f401 + f601) * dt
    if out401 > v401:
        scale = v401 / out401
        f401 *= scale
        f601 *= scale

    nv101 = v101 + (f101 + f601 - f201) * dt
    nv301 = v301 + (f201 - f301) * dt
    nv401 = v401 + (f301 - f401 - f601) * dt

    spill = 0.0
    if nv101 > capacity:
        spill += nv101 - capacity
        nv101 = capacity
    if nv301 > capacity:
        spill += nv301 - capacity
        nv301 = capacity
    if nv401 > capacity:
        spill += nv401 - capacity
        nv401 = capacity
    # Guard against -1e-17 dust from the proportional outflow scaling.
    if nv101 < 0.0:
        nv101 = 0.0
    if nv301 < 0.0:
        nv301 = 0.0
    if nv401 < 0.0:
        nv401 = 0.0

    true = (
        nv101 / capacity * 100.0,
        nv301 / capacity * 100.0,
        nv401 / capacity * 100.0,
        f101,
        f201,
        f301,
        f401,
        dp_gain * f301,
    )
    if noise_sigma != 0.0:
        reported = tuple(
            true[i] * (1.0 + noise_sigma * noise_unit(seed, next_tick, i))
            for i in range(8)
        )
    else:
        reported = true
    return (nv101, nv301, nv401), true, reported, spill


def scan_positions(reported, prev, low_set, high_set, low_guard):
    """Combined three-PLC hysteresis scan (mirror of control.plc_scan).

    ``reported`` follows the sensor layout; ``prev`` is the previously
    commanded actuator tuple.  Returns the full 9-entry position tuple for
    the next tick.
    """
    lit101, lit301, lit401 = reported[0], reported[1], reported[2]

    if lit101 < low_set:
        mv101 = 1
    elif lit101 > high_set:
        mv101 = 0
    else:
        mv101 = prev[0]
    p101 = 1 if (lit301 < high_set and lit101 > low_guard) else 0
    p301 = 1 if (lit401 < high_set and lit301 > low_guard) else 0
    mv201 = p101
    if lit401 > low_guard:
        p401, mcv = 1, 50
    else:
        p401, mcv = 0, prev[8]
    return (mv101, mv201, p101, 0, p301, 0, p401, 0, mcv)


def run_closed_loop(
    volumes,
    positions,
    true,
    reported,
    n_ticks,
    start_tick,
    capacity,
    inlet_rate,
    pump_rate,
    drain_capacity,
    return_rate,
    dp_gain,
    noise_sigma,
    dt,
    seed,
    low_set,
    high_set,
    low_guard,
    forced,
    out_reported,
    out_true,
    out_positions,
    out_spill,
):
    """Run ``n_ticks`` of the loop, filling one output row per tick.

    Row i mirrors the state at tick start_tick+i: reported/true readings and
    the positions that were in effect while stepping into it.  out_spill[i]
    holds the liters discarded while stepping OUT of row i (into row i+1).
    PLC decisions use reported readings; when ``forced`` is not None those
    positions are applied every tick instead of the scan (attacker hold).

    Returns the carry state (volumes, positions, true, reported) for tick
    start_tick + n_ticks, which seeds the next chunk of a segmented run.
    """
    v101, v301, v401 = volumes
    pos = tuple(positions)
    true = tuple(true)
    reported = tuple(reported)
    for i in range(n_ticks):
        for j in range(8):
            out_reported[i, j] = reported[j]
            out_true[i, j] = true[j]
        for j in range(9):
            out_positions[i, j] = pos[j]
        if forced is None:
            nxt = scan_positions(reported, pos, low_set, high_set, low_guard)
        else:
            nxt = forced
        (v101, v301, v401), true, reported, spill = tick_physics(
            v101,
            v301,
            v401,
            nxt,
            capacity,
            inlet_rate,
            pump_rate,
            drain_capacity,
            return_rate,
            dp_gain,
            noise_sigma,
            dt,
            seed,
            start_tick + i + 1,
        )
        out_spill[i] = spill
        pos = nxt
    return (v101, v301, v401), pos, true, reported
