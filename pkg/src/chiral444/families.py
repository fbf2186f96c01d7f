"""The two quotient families and the per-member verification pipeline.

Family P adds relators (a c^-1)^{4m} and (c^-1 a)^{4m} to the base group;
family Q adds (b c^-1)^{4m} and (c^-1 b)^{4m}.  Expected orders are
1024 m^2 and 2048 m^2.  ``verify_member`` runs the full pipeline: order by
coset enumeration, rotation-triple validation, direct intersection
condition, quotient criterion against the m = 1 member, solvability,
mirror test with witness, and (optionally) the polytope axiom suite.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from importlib import resources

from .coset import CosetTable, EnumerationConfig, enumerate_cosets
from .perms import PermGroup, evaluate
from .polytope import (AxiomReport, RotationTriple, build_coset_geometry,
                       chirality_verdict, intersection_condition,
                       quotient_criterion, validate_rotation_triple,
                       verify_axioms)
from .words import Presentation, Word, parse_presentation

FAMILIES = ("P", "Q")

_FAMILY_SEEDS = {"P": ("a*c^-1", "c^-1*a"), "Q": ("b*c^-1", "c^-1*b")}
_BASE_ORDER = {"P": 1024, "Q": 2048}


class VerificationError(RuntimeError):
    """A pipeline stage failed; carries the stage name."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


class EnumerationIncomplete(VerificationError):
    """Coset cap exhausted; rerun with a larger --max-cosets."""

    def __init__(self, stage: str, cap: int):
        super().__init__(stage, f"enumeration exhausted the cap of {cap} cosets; "
                                f"rerun with a larger cap to resume")
        self.cap = cap


def _data_text(name: str) -> str:
    return resources.files("chiral444").joinpath(f"data/{name}").read_text()


_pres_cache: dict[str, Presentation] = {}


def presentation_U() -> Presentation:
    """The three-generator, nine-relator base presentation (bundled file)."""
    p = _pres_cache.get("U")
    if p is None:
        p = parse_presentation(_data_text("U.pres"))
        _pres_cache["U"] = p
    return p


def bundled_presentation(name: str) -> Presentation:
    """One of the bundled presentation files: 'U', 'G1' or 'H1'."""
    key = name.upper()
    p = _pres_cache.get(key)
    if p is None:
        p = parse_presentation(_data_text(f"{key}.pres"))
        _pres_cache[key] = p
    return p


def subgroup_seed_words(family: str, m: int = 1) -> tuple[Word, Word]:
    """The two subgroup generator words of a family member, e.g. x^m, y^m."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    if m < 1:
        raise ValueError("m must be a positive integer")
    u = presentation_U()
    w1, w2 = _FAMILY_SEEDS[family]
    return u.parse_word(f"({w1})^{4 * m}"), u.parse_word(f"({w2})^{4 * m}")


def family_presentation(family: str, m: int) -> Presentation:
    """Base relators plus the family pair at exponent 4m.

    The added words generate a normal subgroup, so the presented quotient is
    exactly the member group (cross-checked by ``normality_cross_check``).
    """
    u = presentation_U()
    extra = subgroup_seed_words(family, m)
    return Presentation(u.names, u.relators + extra)


def expected_order(family: str, m: int) -> int:
    return _BASE_ORDER[family] * m * m


def mirror_witness_relator() -> Word:
    """The relator whose mirror image certifies chirality."""
    return presentation_U().parse_word("a^2*c^2*b^2*(a*c)^2")


@dataclass(frozen=True)
class VerifyOptions:
    max_cosets: int = 1_000_000
    strategy: str = "felsch"  # near-minimal definitions on these quotients
    axioms: bool | None = None  # None: only for m == 1
    intersection_cap: int = 10_000
    axiom_cap: int = 2 ** 14


@dataclass
class MemberReport:
    family: str
    m: int
    order: int
    expected_order: int
    schlafli: tuple[int, int, int]
    solvable: bool
    derived_length: int | None
    intersection_condition: bool
    quotient_criterion: bool
    verdict: str
    witness_order: int | None
    witness_relator: str | None
    axioms: AxiomReport | None
    action_degree: int
    action_faithful_small: bool
    timings_ms: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        ok = (self.order == self.expected_order
              and self.schlafli == (4, 4, 4)
              and self.solvable
              and self.quotient_criterion
              and self.intersection_condition
              and self.verdict == "chiral")
        if self.axioms is not None:
            ok = ok and self.axioms.all_ok
        return ok

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "family": self.family,
            "m": self.m,
            "order": self.order,
            "expected_order": self.expected_order,
            "schlafli": list(self.schlafli),
            "solvable": self.solvable,
            "derived_length": self.derived_length,
            "intersection_condition": self.intersection_condition,
            "quotient_criterion": self.quotient_criterion,
            "verdict": self.verdict,
            "witness_order": self.witness_order,
            "flags": self.axioms.flag_count if self.axioms else None,
            "axioms": ({"p1": self.axioms.p1_ok, "p2": self.axioms.p2_ok,
                        "p3": self.axioms.p3_ok, "p4": self.axioms.p4_ok}
                       if self.axioms else None),
            "timings_ms": self.timings_ms,
        }


class _Timer:
    def __init__(self):
        self.timings: dict[str, float] = {}
        self._t = time.perf_counter()

    def lap(self, stage: str):
        now = time.perf_counter()
        self.timings[stage] = round((now - self._t) * 1000.0, 3)
        self._t = now


def _enumerate_member(family: str, m: int, opts: VerifyOptions) -> CosetTable:
    pres = family_presentation(family, m)
    cfg = EnumerationConfig(strategy=opts.strategy, max_cosets=opts.max_cosets)
    table = enumerate_cosets(pres, [], cfg)
    if not table.is_complete:
        raise EnumerationIncomplete("enumerate", opts.max_cosets)
    return table


def member_triple(family: str, m: int, opts: VerifyOptions | None = None,
                  _diag: dict | None = None) -> RotationTriple:
    """Build the member's rotation triple on a faithful permutation action.

    The small action on cosets of the first two generators is preferred when
    its stabilizer-chain order matches the enumerated group order (that is,
    when it is faithful); otherwise the regular representation is used.
    """
    opts = opts or VerifyOptions()
    table = _enumerate_member(family, m, opts)
    order = table.degree
    pres = table.presentation
    small_cfg = EnumerationConfig(strategy=opts.strategy, max_cosets=opts.max_cosets)
    small = enumerate_cosets(pres, [pres.atom("a"), pres.atom("b")], small_cfg)
    group = None
    faithful_small = False
    if small.is_complete:
        perms = small.permutation_rep()
        candidate = PermGroup(perms, known_order=order)
        if candidate.order() == order:
            group, sigma = candidate, perms
            faithful_small = True
    if group is None:
        sigma = table.permutation_rep()
        group = PermGroup(sigma, known_order=order)
        if group.order() != order:
            raise VerificationError("action", "regular representation order mismatch")
    if _diag is not None:
        _diag["order"] = order
        _diag["degree"] = group.degree
        _diag["faithful_small"] = faithful_small
    return RotationTriple(group, tuple(sigma), pres)


_reference_cache: dict[tuple, RotationTriple] = {}


def reference_triple(family: str, opts: VerifyOptions | None = None) -> RotationTriple:
    """The m = 1 member's triple, the reference for the quotient criterion."""
    opts = opts or VerifyOptions()
    key = (family, opts.strategy, opts.max_cosets)
    t = _reference_cache.get(key)
    if t is None:
        t = member_triple(family, 1, opts)
        _reference_cache[key] = t
    return t


def verify_member(family: str, m: int, opts: VerifyOptions | None = None) -> MemberReport:
    """Run the full verification pipeline for one family member."""
    opts = opts or VerifyOptions()
    timer = _Timer()
    diag: dict = {}
    triple = member_triple(family, m, opts, _diag=diag)
    order = diag["order"]
    timer.lap("enumerate")

    schlafli = validate_rotation_triple(triple.group, triple.sigma)
    timer.lap("validate")

    ic = intersection_condition(triple, cap=opts.intersection_cap)
    timer.lap("intersection")

    ref = reference_triple(family, opts)
    qc = quotient_criterion(triple, ref, cap=opts.intersection_cap)
    timer.lap("quotient_criterion")

    solvable = triple.group.is_solvable()
    dlength = triple.group.derived_length()
    timer.lap("solvability")

    verdict = chirality_verdict(triple, preferred_witness=mirror_witness_relator())
    timer.lap("mirror")

    axioms = None
    want_axioms = opts.axioms if opts.axioms is not None else (m == 1)
    if want_axioms:
        geom = build_coset_geometry(triple, element_cap=opts.axiom_cap)
        axioms = verify_axioms(geom)
        timer.lap("axioms")

    return MemberReport(
        family=family, m=m, order=order,
        expected_order=expected_order(family, m),
        schlafli=schlafli.as_tuple(),
        solvable=solvable, derived_length=dlength,
        intersection_condition=ic, quotient_criterion=qc,
        verdict=verdict.verdict,
        witness_order=verdict.witness_order,
        witness_relator=(triple.presentation.word_str(verdict.witness_relator)
                         if verdict.witness_relator else None),
        axioms=axioms,
        action_degree=diag["degree"],
        action_faithful_small=diag["faithful_small"],
        timings_ms=timer.timings,
    )


def normality_cross_check(family: str, m: int,
                          opts: VerifyOptions | None = None) -> bool:
    """Enumerated subgroup index in the base group equals the quotient order.

    Equality certifies that the added relator pair generates a subgroup that
    is already normal, so the family presentation presents exactly the
    member group.
    """
    opts = opts or VerifyOptions()
    u = presentation_U()
    words = subgroup_seed_words(family, m)
    sub = enumerate_cosets(u, list(words),
                           EnumerationConfig(max_cosets=opts.max_cosets))
    if not sub.is_complete:
        raise EnumerationIncomplete("subgroup-index", opts.max_cosets)
    quo = _enumerate_member(family, m, opts)
    return sub.degree == quo.degree


@dataclass(frozen=True)
class ConjugationCheck:
    label: str
    verified: bool
    cosets_used: int | None


def conjugation_relations(family: str) -> list[tuple[str, Word]]:
    """Words of the form (relation) * (right side)^-1, trivial iff the
    conjugation relation holds, plus the generating pair's commutator."""
    u = presentation_U()
    a, b, c = (u.atom(n) for n in "abc")
    p1, p2 = subgroup_seed_words(family, 1)
    if family == "P":
        x, y = p1, p2
        pairs = [
            ("a^-1*x*a = y", a.inverse() * x * a * y.inverse()),
            ("b^-1*x*b = y", b.inverse() * x * b * y.inverse()),
            ("c^-1*x*c = y", c.inverse() * x * c * y.inverse()),
            ("a^-1*y*a = x", a.inverse() * y * a * x.inverse()),
            ("b^-1*y*b = x^-1", b.inverse() * y * b * x),
            ("c^-1*y*c = x^-1", c.inverse() * y * c * x),
            ("[x,y] = 1", x.inverse() * y.inverse() * x * y),
        ]
    else:
        z, w = p1, p2
        pairs = [
            ("a^-1*z*a = z^-1", a.inverse() * z * a * z),
            ("b^-1*z*b = w", b.inverse() * z * b * w.inverse()),
            ("c^-1*z*c = w", c.inverse() * z * c * w.inverse()),
            ("a^-1*w*a = w", a.inverse() * w * a * w.inverse()),
            ("b^-1*w*b = z^-1", b.inverse() * w * b * z),
            ("c^-1*w*c = z^-1", c.inverse() * w * c * z),
            ("[z,w] = 1", z.inverse() * w.inverse() * z * w),
        ]
    return pairs


def verify_conjugation_action(family: str, cap: int = 1_000_000,
                              start_cap: int = 2000) -> list[ConjugationCheck]:
    """Prove the conjugation relations by partial-enumeration traces.

    Caps escalate geometrically up to ``cap``; a relation is verified once a
    sound trace from coset 1 returns 1, and the cap that first achieved it
    is recorded.  Unverified-within-cap is an outcome, not an error.
    """
    u = presentation_U()
    relations = conjugation_relations(family)
    status: dict[str, ConjugationCheck] = {
        label: ConjugationCheck(label, False, None) for label, _ in relations
    }
    caps = []
    c = min(start_cap, cap)
    while True:
        caps.append(c)
        if c >= cap:
            break
        c = min(c * 2, cap)
    for current in caps:
        pending = [(lbl, w) for lbl, w in relations if not status[lbl].verified]
        if not pending:
            break
        table = enumerate_cosets(u, [], EnumerationConfig(max_cosets=current))
        for label, word in pending:
            if table.trace(1, word) == 1:
                status[label] = ConjugationCheck(label, True, table.definitions)
    return [status[label] for label, _ in relations]


@dataclass(frozen=True)
class CorollaryEntry:
    n: int
    family: str
    m: int
    order: int


def corollary_orders(k_max: int, opts: VerifyOptions | None = None) -> list[CorollaryEntry]:
    """Members with 2-power orders: for k = 0..k_max, family P at m = 2^k has
    order 2^(10+2k) and family Q has 2^(11+2k), covering every 2^n, n >= 10."""
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    opts = opts or VerifyOptions()
    out = []
    for k in range(k_max + 1):
        m = 2 ** k
        for family, n in (("P", 10 + 2 * k), ("Q", 11 + 2 * k)):
            table = _enumerate_member(family, m, opts)
            if table.degree != 2 ** n:
                raise VerificationError(
                    "corollary", f"{family} m={m}: order {table.degree} != 2^{n}")
            out.append(CorollaryEntry(n, family, m, table.degree))
    return out
