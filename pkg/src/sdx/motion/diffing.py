"""Action-granularity diff between two programs.

Actions are matched by id; any field-level difference counts as modified.
Entity sets are compared by id. The diff feeds the refinement locality
check, which needs to know exactly which timeline items changed.
"""

from __future__ import annotations

from .model import Action, ActionChange, ActionDiff, MotionProgram


def _action_key(action: Action) -> tuple:
    return (
        action.entity_id,
        action.kind,
        action.start,
        action.duration,
        action.easing,
        action.repeat,
        _freeze(action.params),
    )


def _freeze(value):
    if isinstance(value, dict):
        return tuple(sorted((k, _freeze(v)) for k, v in value.items()))
    if isinstance(value, (list, tuple)):
        return tuple(_freeze(v) for v in value)
    return value


def diff(a: MotionProgram, b: MotionProgram) -> ActionDiff:
    before = {action.id: action for action in a.timeline}
    after = {action.id: action for action in b.timeline}

    added: dict[str, ActionChange] = {}
    removed: dict[str, ActionChange] = {}
    modified: dict[str, ActionChange] = {}
    for action_id, action in after.items():
        if action_id not in before:
            added[action_id] = ActionChange(before=None, after=action)
        elif _action_key(before[action_id]) != _action_key(action):
            modified[action_id] = ActionChange(before=before[action_id], after=action)
    for action_id, action in before.items():
        if action_id not in after:
            removed[action_id] = ActionChange(before=action, after=None)

    ids_a = {e.id for e in a.entities}
    ids_b = {e.id for e in b.entities}
    return ActionDiff(
        added=added,
        removed=removed,
        modified=modified,
        entities_added=frozenset(ids_b - ids_a),
        entities_removed=frozenset(ids_a - ids_b),
    )


def diff_jsonable(d: ActionDiff) -> dict:
    from .parser import _action_jsonable

    def change(ch: ActionChange) -> dict:
        out = {}
        if ch.before is not None:
            out["before"] = _action_jsonable(ch.before)
        if ch.after is not None:
            out["after"] = _action_jsonable(ch.after)
        return out

    return {
        "added": {k: change(v) for k, v in sorted(d.added.items())},
        "removed": {k: change(v) for k, v in sorted(d.removed.items())},
        "modified": {k: change(v) for k, v in sorted(d.modified.items())},
        "entityChanges": {
            "added": sorted(d.entities_added),
            "removed": sorted(d.entities_removed),
        },
    }
