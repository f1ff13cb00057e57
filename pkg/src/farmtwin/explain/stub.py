"""Deterministic template answer built only from the prompt's runtime record."""
from __future__ import annotations

import json

from farmtwin.explain.prompt import PromptContext


class MalformedRuntimeError(ValueError):
    pass


def _num(x) -> str:
    # integral floats print without the trailing .0; value-equal to the JSON literal
    if isinstance(x, float) and x.is_integer():
        return str(int(x))
    return json.dumps(x)


def _candidate_line(c: dict, best: dict, t_b) -> str:
    d = c["drone_id"]
    if not c["feasible"]:
        return (
            f"Drone {d} was rejected ({c.get('rejection_reason', 'infeasible')}): its predicted battery "
            f"{_num(c['predicted_battery'])} is not above the battery threshold T_b = {_num(t_b)}, "
            f"even though its Δt would be {_num(c['delta_t'])}."
        )
    if c["delta_t"] == best["delta_t"]:
        return (
            f"Drone {d} ties with drone {best['drone_id']} on Δt = {_num(c['delta_t'])}; "
            "the lower drone id wins the tie."
        )
    line = (
        f"Drone {d} was feasible but slower: Δt = {_num(c['delta_t'])} versus "
        f"{_num(best['delta_t'])} for drone {best['drone_id']}"
    )
    if c["t_rem"] == 0:
        line += ", although it is ready now"
    return line + "."


def stub_answer(prompt: PromptContext) -> str:
    try:
        runtime = json.loads(prompt.runtime_section)
        rec = runtime["decision"]
        trig = rec["trigger"]
        t_b = rec["thresholds_snapshot"]["t_b"]
        outcome = rec["outcome"]
        cands = rec["candidates"]
    except (ValueError, KeyError, TypeError) as exc:
        raise MalformedRuntimeError(f"runtime section unusable: {exc}") from exc

    head = (
        f"Decision {rec['decision_id']} at simulation time {_num(rec['sim_time'])}: tile {trig['tile_id']} "
        f"had confidence {_num(trig['confidence'])}"
    )
    if outcome == "no_trigger":
        return (
            head + f", which is at or above the confidence threshold T_alpha = {_num(trig['t_alpha'])}, "
            "so no inspection was needed and no drone was sent."
        )
    head += f", below the confidence threshold T_alpha = {_num(trig['t_alpha'])}, so an inspection drone was requested."
    lines = [head]

    if outcome == "no_feasible_drone":
        if cands:
            lines.append(
                f"No candidate met the battery threshold T_b = {_num(t_b)}, so no drone was sent "
                "and the tile was placed in the pending queue."
            )
            lines.extend(_candidate_line(c, c, t_b) for c in cands)
        else:
            lines.append(
                "No inspection drone was available to simulate: every drone was out of battery or "
                "already had a queued task, so the tile was placed in the pending queue."
            )
        return " ".join(lines)

    try:
        best = next(c for c in cands if c["drone_id"] == rec["selected_drone_id"])
    except (StopIteration, KeyError) as exc:
        raise MalformedRuntimeError("selected drone missing from candidates") from exc
    sel = best["drone_id"]
    lines.append(
        f"Drone {sel} was selected because its total time Δt = {_num(best['delta_t'])} "
        f"(t_rem {_num(best['t_rem'])} + t_disp {_num(best['t_disp'])} + t_insp {_num(best['t_insp'])}) "
        f"is the minimum among the feasible candidates, and its predicted battery "
        f"{_num(best['predicted_battery'])} is above the battery threshold T_b = {_num(t_b)}."
    )
    if best["t_rem"] > 0:
        lines.append(
            f"Drone {sel} is busy and will first finish its current task "
            f"({_num(best['t_rem'])} time units remaining) before flying to tile {trig['tile_id']}."
        )
        if any(c["feasible"] and c["t_rem"] == 0 for c in cands):
            lines.append(
                f"No ready drone was dispatched immediately because no ready candidate has a smaller Δt "
                f"than drone {sel}."
            )
    lines.extend(_candidate_line(c, best, t_b) for c in cands if c["drone_id"] != sel)
    return " ".join(lines)
