"""Machine documents: one JSON object per machine, stable to the byte.

Every document carries "kind" (finite, block, dice-block, pushdown) and
"version" (currently 1).  Serialization is canonical — keys sorted,
two-space indent, transitions listed in a fixed order — so serializing,
reading back, and serializing again reproduces the file exactly.
Integers that can outgrow 64 bits (block thresholds, polynomial
coefficients) travel as decimal strings; structural integers stay plain.
Unknown or missing fields, wrong types, and version mismatches all raise
DocumentError rather than guessing.
"""

from __future__ import annotations

import json
import re

from .automaton import FiniteCoinAutomaton
from .blocks import BlockSimulation
from .dice import DiceBlockSimulation, DiceStage
from .errors import DocumentError
from .pushdown import BlockDrive, PushdownCoinAutomaton, check_pushdown
from .ratfunc import IntPolynomial, RationalFunction

VERSION = 1

_DECIMAL = re.compile(r"-?\d+$")


def _big(value: int) -> str:
    return str(int(value))


def _unbig(value) -> int:
    if not isinstance(value, str) or not _DECIMAL.match(value):
        raise DocumentError(f"expected a decimal string, got {value!r}")
    return int(value)


def _expect_keys(doc: dict, keys: set[str], kind: str) -> None:
    present = set(doc)
    if present != keys:
        unknown = sorted(present - keys)
        missing = sorted(keys - present)
        parts = []
        if unknown:
            parts.append(f"unknown fields {unknown}")
        if missing:
            parts.append(f"missing fields {missing}")
        raise DocumentError(f"{kind} document: " + "; ".join(parts))


def _int_field(doc: dict, key: str) -> int:
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise DocumentError(f"field {key!r} must be an integer")
    return value


def _rational_to_obj(f: RationalFunction) -> dict:
    return {
        "num": [_big(c) for c in f.num.coeffs],
        "den": [_big(c) for c in f.den.coeffs],
    }


def _rational_from_obj(obj) -> RationalFunction:
    if not isinstance(obj, dict) or set(obj) != {"num", "den"}:
        raise DocumentError("rational function needs exactly num and den")
    return RationalFunction.of(
        IntPolynomial.of(_unbig(c) for c in obj["num"]),
        IntPolynomial.of(_unbig(c) for c in obj["den"]),
    )


def machine_to_document(machine) -> dict:
    """Plain-data form of any machine; inverse of document_to_machine."""
    if isinstance(machine, FiniteCoinAutomaton):
        return {
            "kind": "finite",
            "version": VERSION,
            "state_count": machine.state_count,
            "start": machine.start,
            "alphabet_size": machine.alphabet_size,
            "delta": [list(row) for row in machine.delta],
            "outputs": {str(s): label for s, label in sorted(machine.outputs.items())},
        }
    if isinstance(machine, BlockSimulation):
        return {
            "kind": "block",
            "version": VERSION,
            "k": machine.k,
            "r": machine.r,
            "d": [_big(c) for c in machine.d],
            "e": [_big(c) for c in machine.e],
        }
    if isinstance(machine, DiceBlockSimulation):
        stages = []
        node = machine
        while node is not None:
            stage = node.head
            stages.append(
                {
                    "k": stage.k,
                    "r": stage.r,
                    "d": {
                        ",".join(map(str, a)): _big(c)
                        for a, c in sorted(stage.d.items())
                    },
                    "e": {
                        ",".join(map(str, a)): _big(c)
                        for a, c in sorted(stage.e.items())
                    },
                }
            )
            node = node.tail
        return {
            "kind": "dice-block",
            "version": VERSION,
            "s": machine.s,
            "outputs": machine.outputs,
            "stages": stages,
        }
    if isinstance(machine, PushdownCoinAutomaton):
        if machine.symbol_distribution is None:
            distribution = None
        else:
            distribution = [_rational_to_obj(f) for f in machine.symbol_distribution]
        if machine.block_structure is None:
            structure = None
        else:
            structure = {
                "wrapper": machine.block_structure.wrapper,
                "dice": machine_to_document(machine.block_structure.dice),
                "inner": machine_to_document(machine.block_structure.inner),
            }
        return {
            "kind": "pushdown",
            "version": VERSION,
            "state_count": machine.state_count,
            "input_alphabet_size": machine.input_alphabet_size,
            "stack_symbols": machine.stack_symbols,
            "start": machine.start,
            "initial_stack": list(machine.initial_stack),
            "transitions": [
                [s, i, b, t, list(rep)]
                for (s, i, b), (t, rep) in sorted(machine.transitions.items())
            ],
            "finals": {str(s): label for s, label in sorted(machine.finals.items())},
            "symbol_distribution": distribution,
            "structure": structure,
        }
    raise TypeError(f"cannot serialize {type(machine).__name__}")


def _finite_from(doc: dict) -> FiniteCoinAutomaton:
    _expect_keys(
        doc,
        {"kind", "version", "state_count", "start", "alphabet_size", "delta", "outputs"},
        "finite",
    )
    try:
        delta = tuple(tuple(int(t) for t in row) for row in doc["delta"])
        outputs = {int(s): int(label) for s, label in doc["outputs"].items()}
        return FiniteCoinAutomaton(
            state_count=_int_field(doc, "state_count"),
            start=_int_field(doc, "start"),
            delta=delta,
            outputs=outputs,
            alphabet_size=_int_field(doc, "alphabet_size"),
        )
    except (TypeError, ValueError, AttributeError) as exc:
        raise DocumentError(f"bad finite document: {exc}") from exc


def _block_from(doc: dict) -> BlockSimulation:
    _expect_keys(doc, {"kind", "version", "k", "r", "d", "e"}, "block")
    try:
        return BlockSimulation(
            k=_int_field(doc, "k"),
            r=_int_field(doc, "r"),
            d=tuple(_unbig(c) for c in doc["d"]),
            e=tuple(_unbig(c) for c in doc["e"]),
        )
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"bad block document: {exc}") from exc


def _type_key(text: str, s: int) -> tuple[int, ...]:
    parts = text.split(",")
    if len(parts) != s or not all(part.isdigit() for part in parts):
        raise DocumentError(f"bad letter-count key {text!r}")
    return tuple(int(part) for part in parts)


def _dice_from(doc: dict) -> DiceBlockSimulation:
    _expect_keys(doc, {"kind", "version", "s", "outputs", "stages"}, "dice-block")
    s = _int_field(doc, "s")
    stages = doc["stages"]
    if not isinstance(stages, list) or not stages:
        raise DocumentError("dice-block document needs at least one stage")
    built = None
    try:
        for stage_doc in reversed(stages):
            _expect_keys(stage_doc, {"k", "r", "d", "e"}, "dice-block stage")
            stage = DiceStage(
                s=s,
                k=_int_field(stage_doc, "k"),
                r=_int_field(stage_doc, "r"),
                d={_type_key(a, s): _unbig(c) for a, c in stage_doc["d"].items()},
                e={_type_key(a, s): _unbig(c) for a, c in stage_doc["e"].items()},
            )
            built = DiceBlockSimulation(s=s, head=stage, tail=built)
    except (TypeError, ValueError, AttributeError) as exc:
        raise DocumentError(f"bad dice-block document: {exc}") from exc
    if built.outputs != _int_field(doc, "outputs"):
        raise DocumentError(
            f"outputs field says {doc['outputs']}, stages give {built.outputs}"
        )
    return built


def _pushdown_from(doc: dict) -> PushdownCoinAutomaton:
    _expect_keys(
        doc,
        {
            "kind", "version", "state_count", "input_alphabet_size",
            "stack_symbols", "start", "initial_stack", "transitions",
            "finals", "symbol_distribution", "structure",
        },
        "pushdown",
    )
    try:
        transitions = {}
        for entry in doc["transitions"]:
            s, i, b, t, rep = entry
            transitions[(int(s), int(i), int(b))] = (int(t), tuple(int(c) for c in rep))
        distribution = doc["symbol_distribution"]
        if distribution is not None:
            distribution = tuple(_rational_from_obj(f) for f in distribution)
        structure_doc = doc["structure"]
        structure = None
        if structure_doc is not None:
            _expect_keys(structure_doc, {"wrapper", "dice", "inner"}, "structure")
            wrapper = structure_doc["wrapper"]
            if wrapper is not None and not isinstance(wrapper, str):
                raise DocumentError("wrapper must be a string or null")
            structure = BlockDrive(
                dice=document_to_machine(structure_doc["dice"]),
                inner=document_to_machine(structure_doc["inner"]),
                wrapper=wrapper,
            )
            if not isinstance(structure.dice, DiceBlockSimulation) or not isinstance(
                structure.inner, PushdownCoinAutomaton
            ):
                raise DocumentError("structure must pair a dice-block with a pushdown")
        machine = PushdownCoinAutomaton(
            state_count=_int_field(doc, "state_count"),
            input_alphabet_size=_int_field(doc, "input_alphabet_size"),
            stack_symbols=_int_field(doc, "stack_symbols"),
            start=_int_field(doc, "start"),
            initial_stack=tuple(int(c) for c in doc["initial_stack"]),
            transitions=transitions,
            finals={int(s): int(label) for s, label in doc["finals"].items()},
            symbol_distribution=distribution,
            block_structure=structure,
        )
        check_pushdown(machine)
        return machine
    except DocumentError:
        raise
    except (TypeError, ValueError, AttributeError) as exc:
        raise DocumentError(f"bad pushdown document: {exc}") from exc


_LOADERS = {
    "finite": _finite_from,
    "block": _block_from,
    "dice-block": _dice_from,
    "pushdown": _pushdown_from,
}


def document_to_machine(doc):
    if not isinstance(doc, dict):
        raise DocumentError("machine document must be a JSON object")
    kind = doc.get("kind")
    if kind not in _LOADERS:
        raise DocumentError(f"unknown machine kind {kind!r}")
    if doc.get("version") != VERSION:
        raise DocumentError(
            f"unsupported version {doc.get('version')!r}; this reader handles {VERSION}"
        )
    return _LOADERS[kind](doc)


def dumps(machine) -> str:
    """Canonical JSON text of a machine, newline terminated."""
    return json.dumps(machine_to_document(machine), sort_keys=True, indent=2) + "\n"


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"not valid JSON: {exc}") from exc
    return document_to_machine(doc)


def save(machine, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps(machine))


def load(path):
    with open(path, encoding="utf-8") as handle:
        return loads(handle.read())
