"""Hot simulation loop.

Behavior can only change at session boundaries, so the loop walks
boundaries and accrues whole constant-QoS intervals instead of stepping
every slot. Compiled with numba when available; the same code runs (slowly)
as plain Python otherwise. Running utility means are kept as left-to-right
(total, count) pairs so reputation decisions match a naive sum()/len()
transcription bit for bit.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


# Traffic class codes (match model.TrafficClass).
BE = 0
VO = 1

# Floor policy codes (match reputation.FloorPolicy order).
FLOOR_UNCLAMPED = 0
FLOOR_CLAMP_AT_ZERO = 1
FLOOR_HALT_ON_REVOCATION = 2

# Event kind codes (match reputation.EventKind).
EV_UNCHANGED = 0
EV_INCREMENTED = 1
EV_DECREMENTED = 2
EV_REVOKED = 3

# Event log columns.
EV_COLS = ("slot", "station", "kind", "r_before", "r_after", "r_am", "cos_ended", "u_ended", "cos_b_current")


@njit(cache=True, nogil=True)
def _r_am(r, tot_ua, cnt_a, tot_ub, cnt_b, cap):
    if cnt_a > 0 and cnt_b > 0:
        mean_a = tot_ua / cnt_a
        mean_b = tot_ub / cnt_b
        if mean_b > mean_a:
            if mean_a == 0.0:
                return cap
            v = (r + 1) * mean_b / mean_a - 1.0
            if v < cap:
                return v
            return cap
    return float(r)


@njit(cache=True, nogil=True)
def simulate_kernel(
    starts_a,
    lens_a,
    icos_a,
    starts_b,
    lens_b,
    icos_b,
    ta_comb,
    ta_down,
    tb_down,
    tb_up,
    ceiling,
    r0,
    cap,
    floor_policy,
    horizon,
    record_trace,
):
    """Simulate slots [0, horizon) for one strategy profile.

    Boundary protocol at each slot boundary, in order: session-end
    utilities, B-end reputation check then A-end check (B's updated value
    feeds A's check at coincident ends), utility means update, then strategy
    decisions with the fresh reputation (B's announcement before A's rules
    that read it). Session ends falling exactly on the horizon still count.

    Returns (n_done_a, n_done_b, u_a, cos_ann_a, u_b, cos_ann_b, r_trace,
    events, n_events, revoked_slot, halted).
    """
    na = len(starts_a)
    nb = len(starts_b)
    u_a = np.zeros(na, dtype=np.float64)
    u_b = np.zeros(nb, dtype=np.float64)
    cos_ann_a = np.zeros(na, dtype=np.int8)
    cos_ann_b = np.zeros(nb, dtype=np.int8)
    events = np.zeros((na + nb, 9), dtype=np.float64)
    n_events = 0
    r_trace = np.zeros(horizon if record_trace else 0, dtype=np.int64)

    r = np.int64(r0)
    tot_ua = 0.0
    cnt_a = 0
    tot_ub = 0.0
    cnt_b = 0
    revoked = np.int64(-1)
    halted = 0

    ia = 0
    ib = 0
    accr_a = np.int64(0)
    accr_b = np.int64(0)

    # Initial decisions at t = 0: coincident-start rule (B first, then A).
    icb = icos_b[0]
    if r >= tb_down:
        cos_b = BE
        ac_b = BE
    elif r <= tb_up:
        cos_b = VO
        ac_b = VO
    else:
        cos_b = icb
        ac_b = icb
    ica = icos_a[0]
    if r <= ta_down:
        cos_a = BE
        ac_a = BE
        ac_ba = cos_b
    elif r >= ta_comb:
        cos_a = VO
        ac_a = VO
        ac_ba = BE
    else:
        cos_a = ica
        ac_a = ica
        ac_ba = cos_b
    cos_ann_a[0] = cos_a
    cos_ann_b[0] = cos_b

    end_a = starts_a[0] + lens_a[0]
    end_b = starts_b[0] + lens_b[0]
    t = np.int64(0)

    while t < horizon:
        t_next = end_a if end_a < end_b else end_b
        if t_next > horizon:
            t_next = np.int64(horizon)
        fa = 1 if (ac_a == VO and (ac_b == BE or ac_ba == BE)) else 0
        fb = 1 if (ac_a == BE and ac_b == VO and ac_ba == VO) else 0
        dt = t_next - t
        accr_a += fa * dt
        accr_b += fb * dt
        if record_trace:
            for s in range(t, t_next):
                r_trace[s] = r
        t = t_next

        a_ends = end_a == t
        b_ends = end_b == t
        if not (a_ends or b_ends):
            break  # horizon reached mid-session for both stations

        # Step 1: utilities of sessions ending at t.
        ub_k = 0.0
        ua_k = 0.0
        if b_ends:
            ub_k = accr_b / lens_b[ib]
        if a_ends:
            ua_k = accr_a / lens_a[ia]

        # Step 2: reputation checks (B end first), then fold into means.
        if b_ends:
            ram = _r_am(r, tot_ua, cnt_a, tot_ub, cnt_b, cap)
            r_before = r
            if cos_b == VO and ub_k >= 1.0 - ram / ceiling:
                r = r + 1 if r + 1 < ceiling else np.int64(ceiling)
                kind = EV_INCREMENTED
            else:
                kind = EV_UNCHANGED
            events[n_events, 0] = t
            events[n_events, 1] = 1.0
            events[n_events, 2] = kind
            events[n_events, 3] = r_before
            events[n_events, 4] = r
            events[n_events, 5] = ram
            events[n_events, 6] = cos_b
            events[n_events, 7] = ub_k
            events[n_events, 8] = -1.0
            n_events += 1
        if a_ends:
            ram = _r_am(r, tot_ua, cnt_a, tot_ub, cnt_b, cap)
            r_before = r
            kind = EV_UNCHANGED
            if cos_a == VO and ua_k >= ram / ceiling and cos_b == BE:
                kind = EV_DECREMENTED
                if floor_policy == FLOOR_CLAMP_AT_ZERO:
                    r = r - 1 if r > 0 else np.int64(0)
                else:
                    r = r - 1
                    if r < 0 and revoked < 0:
                        revoked = t
                        kind = EV_REVOKED
            events[n_events, 0] = t
            events[n_events, 1] = 0.0
            events[n_events, 2] = kind
            events[n_events, 3] = r_before
            events[n_events, 4] = r
            events[n_events, 5] = ram
            events[n_events, 6] = cos_a
            events[n_events, 7] = ua_k
            events[n_events, 8] = cos_b
            n_events += 1

        if b_ends:
            u_b[ib] = ub_k
            tot_ub += ub_k
            cnt_b += 1
            ib += 1
            accr_b = np.int64(0)
        if a_ends:
            u_a[ia] = ua_k
            tot_ua += ua_k
            cnt_a += 1
            ia += 1
            accr_a = np.int64(0)

        if floor_policy == FLOOR_HALT_ON_REVOCATION and revoked >= 0:
            halted = 1
            break
        if t >= horizon:
            break
        if (a_ends and ia >= na) or (b_ends and ib >= nb):
            break  # schedule exhausted before the horizon

        # Step 3: decisions with the updated reputation.
        if b_ends:
            icb = icos_b[ib]
            if r >= tb_down:
                cos_b = BE
                ac_b = BE
            elif r <= tb_up:
                cos_b = VO
                ac_b = VO
            else:
                cos_b = icb
                ac_b = icb
            cos_ann_b[ib] = cos_b
            end_b = starts_b[ib] + lens_b[ib]
        if a_ends:
            ica = icos_a[ia]
            if r <= ta_down:
                cos_a = BE
                ac_a = BE
                ac_ba = cos_b
            elif r >= ta_comb:
                cos_a = VO
                ac_a = VO
                ac_ba = BE
            else:
                cos_a = ica
                ac_a = ica
                ac_ba = cos_b
            cos_ann_a[ia] = cos_a
            end_a = starts_a[ia] + lens_a[ia]
            if not b_ends:
                # B refreshes its access priority mid-session.
                if r >= tb_down:
                    ac_b = BE
                else:
                    ac_b = cos_b
        elif b_ends:
            # A refreshes its access priorities mid-session.
            if r <= ta_down:
                ac_a = BE
                ac_ba = cos_b
            elif r >= ta_comb:
                ac_a = cos_a
                ac_ba = BE
            else:
                ac_a = cos_a
                ac_ba = cos_b

    return (ia, ib, u_a, cos_ann_a, u_b, cos_ann_b, r_trace, events, n_events, revoked, halted)
