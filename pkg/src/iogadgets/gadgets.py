"""Gadgets as transition graphs, the builtin library, and 2-state classification.

A gadget is a finite set of states and locations together with a set of
traversals ``(state, in_location) -> (state', out_location)``.  Everything in
this module is immutable and pure.
"""
from __future__ import annotations

import enum
import functools
import re
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple


class GadgetError(ValueError):
    """Raised when a gadget violates a precondition of an operation."""


class Transition(NamedTuple):
    from_state: str
    in_loc: str
    to_state: str
    out_loc: str


@dataclass(frozen=True)
class Gadget:
    name: str
    states: tuple[str, ...]
    locations: tuple[str, ...]
    transitions: tuple[Transition, ...]
    default_state: str
    inputs: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ()
    _moves: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "locations", tuple(self.locations))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(
            self, "transitions", tuple(Transition(*t) for t in self.transitions)
        )
        if len(set(self.states)) != len(self.states) or not self.states:
            raise GadgetError(f"{self.name}: states must be distinct and nonempty")
        if len(set(self.locations)) != len(self.locations):
            raise GadgetError(f"{self.name}: duplicate location")
        if self.default_state not in self.states:
            raise GadgetError(f"{self.name}: unknown default state {self.default_state!r}")
        locs = set(self.locations)
        if not set(self.inputs) <= locs or not set(self.outputs) <= locs:
            raise GadgetError(f"{self.name}: inputs/outputs must be locations")
        sts = set(self.states)
        moves: dict[tuple[str, str], list[Transition]] = {}
        for t in self.transitions:
            if t.from_state not in sts or t.to_state not in sts:
                raise GadgetError(f"{self.name}: transition {t} uses an unknown state")
            if t.in_loc not in locs or t.out_loc not in locs:
                raise GadgetError(f"{self.name}: transition {t} uses an unknown location")
            moves.setdefault((t.from_state, t.in_loc), []).append(t)
        object.__setattr__(self, "_moves", {k: tuple(v) for k, v in moves.items()})

    def moves(self, state: str, loc: str) -> tuple[Transition, ...]:
        """Traversals available when entering ``loc`` in ``state``, in declaration order."""
        return self._moves.get((state, loc), ())

    @property
    def entrances(self) -> tuple[str, ...]:
        """Locations an agent can enter: the inputs if declared, else every location."""
        if self.inputs:
            return self.inputs
        return self.locations

    # -- structural predicates -------------------------------------------------

    def io_violations(self) -> list[str]:
        errs = []
        if not self.inputs:
            errs.append("no input locations declared")
        if set(self.inputs) & set(self.outputs):
            errs.append("inputs and outputs overlap")
        if set(self.inputs) | set(self.outputs) != set(self.locations):
            errs.append("inputs and outputs do not cover the locations")
        ins, outs = set(self.inputs), set(self.outputs)
        for t in self.transitions:
            if t.in_loc not in ins or t.out_loc not in outs:
                errs.append(f"transition {tuple(t)} is not input->output")
        for s in self.states:
            for i in self.inputs:
                if not self.moves(s, i):
                    errs.append(f"no traversal from ({s}, {i})")
        return errs

    @property
    def is_input_output(self) -> bool:
        return not self.io_violations()

    @property
    def is_deterministic(self) -> bool:
        return all(len(v) <= 1 for v in self._moves.values())

    @property
    def is_output_disjoint(self) -> bool:
        source: dict[str, str] = {}
        for t in self.transitions:
            if source.setdefault(t.out_loc, t.in_loc) != t.in_loc:
                return False
        return True

    def transition_set(self) -> frozenset[Transition]:
        return frozenset(self.transitions)

    def renamed(
        self,
        name: str | None = None,
        states: dict[str, str] | None = None,
        locations: dict[str, str] | None = None,
    ) -> "Gadget":
        """Copy with states and/or locations renamed (unmapped names are kept)."""
        sm = states or {}
        lm = locations or {}
        S = lambda s: sm.get(s, s)  # noqa: E731
        L = lambda l: lm.get(l, l)  # noqa: E731
        return Gadget(
            name=self.name if name is None else name,
            states=tuple(S(s) for s in self.states),
            locations=tuple(L(l) for l in self.locations),
            transitions=tuple(
                Transition(S(t.from_state), L(t.in_loc), S(t.to_state), L(t.out_loc))
                for t in self.transitions
            ),
            default_state=S(self.default_state),
            inputs=tuple(L(l) for l in self.inputs),
            outputs=tuple(L(l) for l in self.outputs),
        )


# -- subunits -------------------------------------------------------------------


class Subunit(enum.Enum):
    TRIVIAL_LINE = "TrivialLine"
    SET_UP_LINE = "SetUpLine"
    SET_DOWN_LINE = "SetDownLine"
    TOGGLE_LINE = "ToggleLine"
    SWITCH = "Switch"
    SET_UP_SWITCH = "SetUpSwitch"
    SET_DOWN_SWITCH = "SetDownSwitch"
    TOGGLE_SWITCH = "ToggleSwitch"

    @property
    def is_switch(self) -> bool:
        return self in _SWITCHES

    @property
    def changes_state(self) -> bool:
        return self not in (Subunit.TRIVIAL_LINE, Subunit.SWITCH)

    @property
    def can_set_up(self) -> bool:
        return self in (Subunit.SET_UP_LINE, Subunit.SET_UP_SWITCH,
                        Subunit.TOGGLE_LINE, Subunit.TOGGLE_SWITCH)

    @property
    def can_set_down(self) -> bool:
        return self in (Subunit.SET_DOWN_LINE, Subunit.SET_DOWN_SWITCH,
                        Subunit.TOGGLE_LINE, Subunit.TOGGLE_SWITCH)

    def compressed(self) -> "Subunit":
        return _COMPRESS.get(self, self)

    def reflected(self) -> "Subunit":
        return _REFLECT.get(self, self)


_SWITCHES = frozenset({Subunit.SWITCH, Subunit.SET_UP_SWITCH,
                       Subunit.SET_DOWN_SWITCH, Subunit.TOGGLE_SWITCH})
_COMPRESS = {
    Subunit.SWITCH: Subunit.TRIVIAL_LINE,
    Subunit.SET_UP_SWITCH: Subunit.SET_UP_LINE,
    Subunit.SET_DOWN_SWITCH: Subunit.SET_DOWN_LINE,
    Subunit.TOGGLE_SWITCH: Subunit.TOGGLE_LINE,
}
_REFLECT = {
    Subunit.SET_UP_LINE: Subunit.SET_DOWN_LINE,
    Subunit.SET_DOWN_LINE: Subunit.SET_UP_LINE,
    Subunit.SET_UP_SWITCH: Subunit.SET_DOWN_SWITCH,
    Subunit.SET_DOWN_SWITCH: Subunit.SET_UP_SWITCH,
}
# (next state when entered in up, next state when entered in down), by effect
_EFFECTS = {
    ("up", "down"): (Subunit.TRIVIAL_LINE, Subunit.SWITCH),
    ("up", "up"): (Subunit.SET_UP_LINE, Subunit.SET_UP_SWITCH),
    ("down", "down"): (Subunit.SET_DOWN_LINE, Subunit.SET_DOWN_SWITCH),
    ("down", "up"): (Subunit.TOGGLE_LINE, Subunit.TOGGLE_SWITCH),
}
_EFFECT_OF = {k: eff for eff, pair in _EFFECTS.items() for k in pair}
# canonical input ordering used when comparing gadgets
_KIND_RANK = {k: n for n, k in enumerate([
    Subunit.SWITCH, Subunit.SET_UP_SWITCH, Subunit.SET_DOWN_SWITCH, Subunit.TOGGLE_SWITCH,
    Subunit.SET_UP_LINE, Subunit.SET_DOWN_LINE, Subunit.TOGGLE_LINE, Subunit.TRIVIAL_LINE,
])}


class Piece(NamedTuple):
    """One input of a 2-state gadget: its subunit kind and its exits.

    ``outputs`` is ``(out,)`` for lines and ``(top, bottom)`` for switches, where
    ``top`` is the exit taken in the first ("up") state.
    """
    kind: Subunit
    outputs: tuple[str, ...]


@dataclass(frozen=True)
class Decomposition:
    states: tuple[str, str]
    pieces: dict[str, Piece]

    def kinds(self) -> dict[str, Subunit]:
        return {i: p.kind for i, p in self.pieces.items()}


def synthesize(name: str, decomposition: Decomposition, default_state: str | None = None) -> Gadget:
    """Build the gadget whose inputs are exactly the given subunits sharing one state."""
    up, down = decomposition.states
    locs: list[str] = []
    outs: list[str] = []
    trans: list[Transition] = []
    for inp, (kind, outputs) in decomposition.pieces.items():
        named = {"up": up, "down": down}
        nxt_up, nxt_down = (named[e] for e in _EFFECT_OF[kind])
        if kind.is_switch:
            top, bottom = outputs
        else:
            (top,) = outputs
            bottom = top
        trans.append(Transition(up, inp, nxt_up, top))
        trans.append(Transition(down, inp, nxt_down, bottom))
        locs.append(inp)
        outs.extend(outputs)
    ins = list(decomposition.pieces)
    return Gadget(
        name=name,
        states=(up, down),
        locations=tuple(ins + outs),
        transitions=tuple(trans),
        default_state=up if default_state is None else default_state,
        inputs=tuple(ins),
        outputs=tuple(outs),
    )


def compose(name: str, kinds: Iterable[Subunit], default_state: str = "up") -> Gadget:
    """A 2-state gadget made of the given subunits, with indexed location names.

    Subunit ``i`` (1-based) has input ``in{i}`` and exits ``out{i}`` (lines) or
    ``top{i}``/``bottom{i}`` (switches).
    """
    pieces = {}
    for i, kind in enumerate(kinds, 1):
        outs = (f"top{i}", f"bottom{i}") if kind.is_switch else (f"out{i}",)
        pieces[f"in{i}"] = Piece(kind, outs)
    return synthesize(name, Decomposition(("up", "down"), pieces), default_state)


# -- builtin library -------------------------------------------------------------

_S = Subunit
_COMPOSITES: dict[str, tuple[Subunit, ...]] = {
    "switch": (_S.SWITCH,),
    "set-up-line": (_S.SET_UP_LINE,),
    "set-down-line": (_S.SET_DOWN_LINE,),
    "toggle-line": (_S.TOGGLE_LINE,),
    "set-up-switch": (_S.SET_UP_SWITCH,),
    "set-down-switch": (_S.SET_DOWN_SWITCH,),
    "toggle-switch": (_S.TOGGLE_SWITCH,),
    "switch+set-up-line": (_S.SWITCH, _S.SET_UP_LINE),
    "set-up-switch+set-up-line": (_S.SET_UP_SWITCH, _S.SET_UP_LINE),
    "switch+toggle-line": (_S.SWITCH, _S.TOGGLE_LINE),
    "switch+set-up-line+set-down-line": (_S.SWITCH, _S.SET_UP_LINE, _S.SET_DOWN_LINE),
    "set-up-switch+toggle-line": (_S.SET_UP_SWITCH, _S.TOGGLE_LINE),
    "set-up-switch+set-down-line": (_S.SET_UP_SWITCH, _S.SET_DOWN_LINE),
    "toggle-switch+toggle-line": (_S.TOGGLE_SWITCH, _S.TOGGLE_LINE),
    "toggle-switch+set-up-line": (_S.TOGGLE_SWITCH, _S.SET_UP_LINE),
    "toggle-switch+toggle-switch": (_S.TOGGLE_SWITCH, _S.TOGGLE_SWITCH),
}

BOUNDED_BASIS = ("switch+set-up-line", "set-up-switch+set-up-line")
UNBOUNDED_BASIS = (
    "switch+toggle-line",
    "switch+set-up-line+set-down-line",
    "set-up-switch+toggle-line",
    "set-up-switch+set-down-line",
    "toggle-switch+toggle-line",
    "toggle-switch+set-up-line",
)
BASIS = BOUNDED_BASIS + UNBOUNDED_BASIS

BUILTIN_NAMES = tuple(_COMPOSITES) + ("branching-hallway", "k-switch")


def branching_hallway() -> Gadget:
    return Gadget(
        name="branching-hallway",
        states=("s",),
        locations=("in1", "top1", "bottom1"),
        transitions=(Transition("s", "in1", "s", "top1"),
                     Transition("s", "in1", "s", "bottom1")),
        default_state="s",
        inputs=("in1",),
        outputs=("top1", "bottom1"),
    )


def k_switch(k: int, copies: int = 1) -> Gadget:
    """``k`` states; ``k`` lines ``set{j}`` forcing state ``j``; ``copies`` read-only switches.

    Switch copy ``c`` enters at ``in{c}`` and leaves at ``out{c}_{j}`` in state ``j``.
    """
    if k < 1 or copies < 1:
        raise GadgetError("k-switch needs k >= 1 and at least one switch copy")
    states = tuple(str(j) for j in range(k))
    ins, outs, trans = [], [], []
    for c in range(1, copies + 1):
        ins.append(f"in{c}")
        for j in states:
            outs.append(f"out{c}_{j}")
            trans.append(Transition(j, f"in{c}", j, f"out{c}_{j}"))
    for j in states:
        ins.append(f"set{j}")
        outs.append(f"set{j}_out")
        for s in states:
            trans.append(Transition(s, f"set{j}", j, f"set{j}_out"))
    name = f"k-switch({k})" if copies == 1 else f"k-switch({k},{copies})"
    return Gadget(name, states, tuple(ins + outs), tuple(trans), "0", tuple(ins), tuple(outs))


_KSWITCH_RE = re.compile(r"^k-switch\((\d+)(?:,\s*(\d+))?\)$")


@functools.lru_cache(maxsize=None)
def builtin(name: str, k: int | None = None, copies: int = 1) -> Gadget:
    """Look up a builtin gadget by name.

    >>> builtin("toggle-switch").moves("up", "in1")
    (Transition(from_state='up', in_loc='in1', to_state='down', out_loc='top1'),)
    """
    if name in _COMPOSITES:
        return compose(name, _COMPOSITES[name])
    if name == "branching-hallway":
        return branching_hallway()
    m = _KSWITCH_RE.match(name)
    if m:
        return k_switch(int(m.group(1)), int(m.group(2) or 1))
    if name == "k-switch":
        if k is None:
            raise GadgetError("k-switch needs k")
        return k_switch(k, copies)
    raise GadgetError(f"unknown builtin gadget {name!r}")


def trainyard_gadget() -> Gadget:
    """Three locations; A and B always lead to C, C leads to A (up) or B (down); every pass toggles."""
    return Gadget(
        name="trainyard",
        states=("up", "down"),
        locations=("A", "B", "C"),
        transitions=(
            Transition("up", "A", "down", "C"), Transition("down", "A", "up", "C"),
            Transition("up", "B", "down", "C"), Transition("down", "B", "up", "C"),
            Transition("up", "C", "down", "A"), Transition("down", "C", "up", "B"),
        ),
        default_state="up",
    )


# -- classification -------------------------------------------------------------------


class Category(enum.Enum):
    TRIVIAL = "Trivial"
    BOUNDED = "Bounded"
    UNBOUNDED = "Unbounded"


class Arity(enum.Enum):
    SINGLE_INPUT = "SingleInput"
    MULTI_INPUT = "MultiInput"


class GadgetClass(NamedTuple):
    category: Category
    input_arity: Arity
    nontrivial_inputs: int


def _require_classifiable(g: Gadget) -> None:
    if len(g.states) != 2:
        raise GadgetError(f"{g.name}: not 2-state ({len(g.states)} states)")
    errs = g.io_violations()
    if errs:
        raise GadgetError(f"{g.name}: not input/output: {errs[0]}")
    if not g.is_deterministic:
        raise GadgetError(f"{g.name}: not deterministic")
    if not g.is_output_disjoint:
        raise GadgetError(f"{g.name}: not output-disjoint")


def decompose(g: Gadget) -> Decomposition:
    """Classify every input of an output-disjoint deterministic 2-state gadget.

    The first declared state plays the role of "up".
    """
    _require_classifiable(g)
    up, down = g.states
    name_of = {up: "up", down: "down"}
    pieces = {}
    for inp in g.inputs:
        (tu,) = g.moves(up, inp)
        (td,) = g.moves(down, inp)
        line_kind, switch_kind = _EFFECTS[(name_of[tu.to_state], name_of[td.to_state])]
        if tu.out_loc == td.out_loc:
            pieces[inp] = Piece(line_kind, (tu.out_loc,))
        else:
            pieces[inp] = Piece(switch_kind, (tu.out_loc, td.out_loc))
    return Decomposition((up, down), pieces)


def _classify_kinds(kinds: Iterable[Subunit]) -> GadgetClass:
    kinds = list(kinds)
    nontrivial = sum(k is not Subunit.TRIVIAL_LINE for k in kinds)
    arity = Arity.MULTI_INPUT if nontrivial >= 2 else Arity.SINGLE_INPUT
    has_switch = any(k.is_switch for k in kinds)
    changes = any(k.changes_state for k in kinds)
    if not (has_switch and changes):
        cat = Category.TRIVIAL
    elif any(k.can_set_up for k in kinds) and any(k.can_set_down for k in kinds):
        cat = Category.UNBOUNDED
    else:
        cat = Category.BOUNDED
    return GadgetClass(cat, arity, nontrivial)


def classify(g: Gadget) -> GadgetClass:
    return _classify_kinds(decompose(g).kinds().values())


def reflect(g: Gadget) -> Gadget:
    """Exchange the roles of the two states (an involution)."""
    if len(g.states) != 2:
        raise GadgetError(f"{g.name}: reflect needs a 2-state gadget")
    a, b = g.states
    suffix = "/reflected"
    name = g.name[: -len(suffix)] if g.name.endswith(suffix) else g.name + suffix
    swapped = g.renamed(name=name, states={a: b, b: a})
    # keep the declared state order so the first state is still "up"
    return Gadget(name, g.states, swapped.locations, swapped.transitions,
                  swapped.default_state, swapped.inputs, swapped.outputs)


def compress_switch(g: Gadget, inp: str) -> Gadget:
    """Merge the two exits of the switch-type subunit at ``inp`` into its top exit."""
    dec = decompose(g)
    if inp not in dec.pieces:
        raise GadgetError(f"{g.name}: {inp!r} is not an input")
    piece = dec.pieces[inp]
    if not piece.kind.is_switch:
        raise GadgetError(f"{g.name}: input {inp!r} is a {piece.kind.value}, not a switch")
    pieces = dict(dec.pieces)
    pieces[inp] = Piece(piece.kind.compressed(), piece.outputs[:1])
    return synthesize(g.name + f"/compress({inp})", Decomposition(dec.states, pieces), g.default_state)


def drop_input(g: Gadget, inp: str) -> Gadget:
    """Forget an input and its exits (the gadget is simply never entered there)."""
    dec = decompose(g)
    if inp not in dec.pieces:
        raise GadgetError(f"{g.name}: {inp!r} is not an input")
    pieces = {i: p for i, p in dec.pieces.items() if i != inp}
    return synthesize(g.name + f"/drop({inp})", Decomposition(dec.states, pieces), g.default_state)


def canonical_table(g: Gadget) -> frozenset[tuple[str, str, str, str]]:
    """Transition table after renaming states to up/down and locations by (kind, input order)."""
    dec = decompose(g)
    order = sorted(enumerate(dec.pieces.items()), key=lambda e: (_KIND_RANK[e[1][1].kind], e[0]))
    pieces = {}
    for n, (_, (_, piece)) in enumerate(order):
        outs = tuple(f"o{n}.{j}" for j in range(len(piece.outputs)))
        pieces[f"i{n}"] = piece._replace(outputs=outs)
    canon = synthesize("canon", Decomposition(("up", "down"), pieces))
    return frozenset(tuple(t) for t in canon.transitions)


def same_gadget(a: Gadget, b: Gadget) -> bool:
    return canonical_table(a) == canonical_table(b)


# -- basis reduction --------------------------------------------------------------------


class Step(NamedTuple):
    op: str  # "reflect" | "compress" | "drop"
    input: str | None = None


def replay(g: Gadget, witness: Iterable[Step]) -> Gadget:
    for step in witness:
        if step.op == "reflect":
            g = reflect(g)
        elif step.op == "compress":
            g = compress_switch(g, step.input)
        elif step.op == "drop":
            g = drop_input(g, step.input)
        else:
            raise GadgetError(f"unknown witness step {step.op!r}")
    return g


def basis_reduce(g: Gadget) -> tuple[str, list[Step]]:
    """Find which basis gadget ``g`` simulates, with a replayable witness.

    Keeps one switch-type input (an ordinary switch if there is one, else the
    lowest-indexed switch), compresses every other switch, then discards
    redundant lines and reflects so that set lines/switches point up.
    """
    dec = decompose(g)
    cls = _classify_kinds(dec.kinds().values())
    if cls.category is Category.TRIVIAL:
        raise GadgetError(f"{g.name}: trivial gadgets have no basis")
    if cls.input_arity is Arity.SINGLE_INPUT:
        raise GadgetError(f"{g.name}: single-input gadgets have no basis")
    kinds = dec.kinds()
    inputs = list(kinds)
    switches = [i for i in inputs if kinds[i].is_switch]
    plain = [i for i in switches if kinds[i] is Subunit.SWITCH]
    keep = plain[0] if plain else switches[0]

    witness: list[Step] = []
    after = {}
    for i in inputs:
        if i != keep and kinds[i].is_switch:
            witness.append(Step("compress", i))
            after[i] = kinds[i].compressed()
        else:
            after[i] = kinds[i]
    for i in inputs:
        if after[i] is Subunit.TRIVIAL_LINE:
            witness.append(Step("drop", i))
    lines = [i for i in inputs if i != keep and after[i] is not Subunit.TRIVIAL_LINE]
    sw = after[keep]

    def first(kind):
        return next((i for i in lines if after[i] is kind), None)

    reflected = False
    kept_lines: list[str]
    if cls.category is Category.BOUNDED:
        if sw is Subunit.SET_DOWN_SWITCH or any(after[i] is Subunit.SET_DOWN_LINE for i in lines):
            reflected = True
        kept_lines = lines[:1]
        name = "switch+set-up-line" if sw is Subunit.SWITCH else "set-up-switch+set-up-line"
    elif sw is Subunit.SWITCH:
        t = first(Subunit.TOGGLE_LINE)
        if t is not None:
            kept_lines, name = [t], "switch+toggle-line"
        else:
            kept_lines = [first(Subunit.SET_UP_LINE), first(Subunit.SET_DOWN_LINE)]
            name = "switch+set-up-line+set-down-line"
    elif sw in (Subunit.SET_UP_SWITCH, Subunit.SET_DOWN_SWITCH):
        reflected = sw is Subunit.SET_DOWN_SWITCH
        opposite = Subunit.SET_UP_LINE if reflected else Subunit.SET_DOWN_LINE
        t = first(Subunit.TOGGLE_LINE)
        if t is not None:
            kept_lines, name = [t], "set-up-switch+toggle-line"
        else:
            kept_lines, name = [first(opposite)], "set-up-switch+set-down-line"
    else:  # toggle switch
        t = first(Subunit.TOGGLE_LINE)
        if t is not None:
            kept_lines, name = [t], "toggle-switch+toggle-line"
        else:
            up = first(Subunit.SET_UP_LINE)
            if up is None:
                up, reflected = first(Subunit.SET_DOWN_LINE), True
            kept_lines, name = [up], "toggle-switch+set-up-line"
    for i in lines:
        if i not in kept_lines:
            witness.append(Step("drop", i))
    if reflected:
        witness.insert(0, Step("reflect"))
    return name, witness
