"""
Coverage functions induced by the k-prover proof system over 3CNF-5 formulas.

Questions Q pick ell/2 clauses and ell/2 variables; random states R pick ell clauses and
one variable position inside each. Prover i receives clause r_j where its codeword
has a 1 and the distinguished variable x_j elsewhere. The universe is [k]^L x R with
L = 2^ell, and item (q, a, i) covers B(r, rho, i) = {u in U_r : u_rho = i} for every r
that sends q to prover i, rho being the assignment to the distinguished variables
that answer a induces.

Indices are 0-based internally; formulas use 1-based signed literals.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import settings
from ..core.exceptions import CapExceededError, GadgetConstructionError, PreconditionError
from ..models.itemset import ItemSet
from ..models.setfn import CoverageFn
from ..utils.parallel import map_items

logger = logging.getLogger(__name__)

Clause = Tuple[int, int, int]


@dataclass(frozen=True)
class Formula3CNF5:
    """3CNF formula in which every variable occurs in exactly five clauses, at most once per clause."""

    n_vars: int
    clauses: Tuple[Clause, ...]

    def __post_init__(self):
        clauses = tuple(tuple(int(lit) for lit in clause) for clause in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        n = self.n_vars
        if n < 3 or n % 3:
            raise GadgetConstructionError(f"Variable count must be a positive multiple of 3, got {n}")
        if len(clauses) != 5 * n // 3:
            raise GadgetConstructionError(f"Expected {5 * n // 3} clauses, got {len(clauses)}")
        occurrences = [0] * n
        for index, clause in enumerate(clauses):
            if len(clause) != 3:
                raise GadgetConstructionError(f"Clause {index + 1} has {len(clause)} literals")
            variables = [abs(lit) for lit in clause]
            if any(v == 0 or v > n for v in variables):
                raise GadgetConstructionError(f"Clause {index + 1} has a literal outside 1..{n}")
            if len(set(variables)) != 3:
                raise GadgetConstructionError(f"Clause {index + 1} repeats a variable")
            for v in variables:
                occurrences[v - 1] += 1
        bad = [v + 1 for v, count in enumerate(occurrences) if count != 5]
        if bad:
            raise GadgetConstructionError(f"Variables {bad} do not occur exactly five times")

    @property
    def n_clauses(self) -> int:
        return len(self.clauses)

    def clause_variables(self, c: int) -> Tuple[int, int, int]:
        """0-based variables of clause c, in literal order."""
        return tuple(abs(lit) - 1 for lit in self.clauses[c])

    def clause_satisfied(self, c: int, bits: Sequence[int]) -> bool:
        """Whether the 3-bit assignment (in literal order) satisfies clause c."""
        return any((lit > 0) == bool(bit) for lit, bit in zip(self.clauses[c], bits))

    def satisfies(self, assignment: Sequence[bool]) -> bool:
        if len(assignment) != self.n_vars:
            raise PreconditionError(f"Assignment has {len(assignment)} values for {self.n_vars} variables")
        return all(
            self.clause_satisfied(c, [assignment[v] for v in self.clause_variables(c)])
            for c in range(self.n_clauses)
        )

    @classmethod
    def random_planted(cls, n_vars: int, seed: Optional[int] = None) -> Tuple["Formula3CNF5", Tuple[bool, ...]]:
        """
        Random formula together with a satisfying assignment.

        Five rounds each split a fresh permutation of the variables into triples,
        which gives every variable exactly five occurrences. Signs are random, and
        a clause the planted assignment falsifies gets one literal flipped.
        """
        if n_vars < 3 or n_vars % 3:
            raise GadgetConstructionError(f"Variable count must be a positive multiple of 3, got {n_vars}")
        rng = np.random.default_rng(seed)
        assignment = tuple(bool(b) for b in rng.integers(0, 2, size=n_vars))
        clauses = []
        for _ in range(5):
            order = rng.permutation(n_vars)
            for start in range(0, n_vars, 3):
                variables = [int(v) for v in order[start:start + 3]]
                signs = rng.integers(0, 2, size=3)
                literals = [(v + 1) if s else -(v + 1) for v, s in zip(variables, signs)]
                if not any((lit > 0) == assignment[abs(lit) - 1] for lit in literals):
                    flip = int(rng.integers(0, 3))
                    literals[flip] = -literals[flip]
                clauses.append(tuple(literals))
        return cls(n_vars=n_vars, clauses=tuple(clauses)), assignment


def _distance(a: str, b: str) -> int:
    return sum(x != y for x, y in zip(a, b))


@dataclass(frozen=True)
class KProverParams:
    """k codewords of length ell (even), weight ell/2 and pairwise distance at least ell/3."""

    k: int
    ell: int
    codewords: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "codewords", tuple(self.codewords))
        if self.k < 1:
            raise GadgetConstructionError(f"k must be positive, got {self.k}")
        if self.ell < 2 or self.ell % 2:
            raise GadgetConstructionError(f"ell must be a positive even number, got {self.ell}")
        if len(self.codewords) != self.k:
            raise GadgetConstructionError(f"Expected {self.k} codewords, got {len(self.codewords)}")
        for word in self.codewords:
            if len(word) != self.ell or set(word) - {"0", "1"}:
                raise GadgetConstructionError(f"Codeword {word!r} is not a bitstring of length {self.ell}")
            if word.count("1") != self.ell // 2:
                raise GadgetConstructionError(f"Codeword {word!r} does not have weight {self.ell // 2}")
        for a, b in combinations(self.codewords, 2):
            if 3 * _distance(a, b) < self.ell:
                raise GadgetConstructionError(f"Codewords {a!r} and {b!r} are closer than ell/3")

    @classmethod
    def with_greedy_codebook(cls, k: int, ell: int) -> "KProverParams":
        return cls(k=k, ell=ell, codewords=greedy_codebook(k, ell))


def greedy_codebook(k: int, ell: int) -> Tuple[str, ...]:
    """First k weight-ell/2 words, in combination order, that keep distance >= ell/3 from the ones kept."""
    if ell < 2 or ell % 2:
        raise GadgetConstructionError(f"ell must be a positive even number, got {ell}")
    chosen: List[str] = []
    for ones in combinations(range(ell), ell // 2):
        word = "".join("1" if j in ones else "0" for j in range(ell))
        if all(3 * _distance(word, other) >= ell for other in chosen):
            chosen.append(word)
            if len(chosen) == k:
                return tuple(chosen)
    raise GadgetConstructionError(f"No codebook of {k} words found for ell = {ell}")


@dataclass(frozen=True)
class ProverItem:
    """Prover `prover` answering question `question` (clause ids, then variable ids) with `answer` bits."""

    question: Tuple[int, ...]
    answer: Tuple[int, ...]
    prover: int


@dataclass
class KProverCoverage:
    """The materialized construction; `function` is the normalized coverage over `items`."""

    formula: Formula3CNF5
    params: KProverParams
    function: CoverageFn
    items: List[ProverItem]
    question_count: int
    randomness_count: int
    item_index: Dict[ProverItem, int] = field(repr=False, default_factory=dict)

    @property
    def k_prime(self) -> int:
        return self.params.k * self.question_count

    @property
    def L(self) -> int:
        return 2 ** self.params.ell

    @property
    def block_size(self) -> int:
        """|U_r| = k^L."""
        return self.params.k ** self.L

    def block(self, r: int, j: int, i: int) -> int:
        """B(r, j, i) as a bitmask over U: the u in U_r whose j-th coordinate is i."""
        return _digit_mask(self.params.k, self.L, j, i) << (r * self.block_size)

    def slice_mask(self, r: int) -> int:
        """U_r as a bitmask over U."""
        return ((1 << self.block_size) - 1) << (r * self.block_size)

    def planted_set(self, assignment: Sequence[bool]) -> ItemSet:
        """
        {(q, a(q), i)}: every prover answers every question consistently with `assignment`.

        Raises:
            PreconditionError: if the assignment does not satisfy the formula
        """
        if not self.formula.satisfies(assignment):
            raise PreconditionError("The planted assignment must satisfy the formula")
        half = self.params.ell // 2
        chosen = []
        for question in _questions(self.formula, half):
            answer = []
            for c in question[:half]:
                answer.extend(int(assignment[v]) for v in self.formula.clause_variables(c))
            answer.extend(int(assignment[v]) for v in question[half:])
            for i in range(self.params.k):
                chosen.append(self.item_index[ProverItem(question, tuple(answer), i)])
        return ItemSet.from_indices(chosen, self.function.n)


_DIGIT_MASKS: Dict[Tuple[int, int, int, int], int] = {}


def _digit_mask(k: int, L: int, j: int, i: int) -> int:
    key = (k, L, j, i)
    if key not in _DIGIT_MASKS:
        positions = np.arange(k ** L, dtype=np.int64)
        hits = (positions // k ** j) % k == i
        _DIGIT_MASKS[key] = int.from_bytes(np.packbits(hits, bitorder="little").tobytes(), "little")
    return _DIGIT_MASKS[key]


def _questions(formula: Formula3CNF5, half: int):
    clause_ids = range(formula.n_clauses)
    variable_ids = range(formula.n_vars)
    for clauses in product(clause_ids, repeat=half):
        for variables in product(variable_ids, repeat=half):
            yield clauses + variables


def _valid_answers(formula: Formula3CNF5, question: Tuple[int, ...], half: int) -> List[Tuple[int, ...]]:
    """Answers whose clause parts satisfy their clauses; 3 bits per clause query, then 1 bit per variable."""
    per_clause = [
        [bits for bits in product((0, 1), repeat=3) if formula.clause_satisfied(c, bits)]
        for c in question[:half]
    ]
    answers = []
    for clause_bits in product(*per_clause):
        for variable_bits in product((0, 1), repeat=half):
            answers.append(tuple(b for bits in clause_bits for b in bits) + variable_bits)
    return answers


def universe_size(formula: Formula3CNF5, params: KProverParams) -> int:
    """k^L |R| with |R| = (5n/3)^ell 3^ell."""
    return params.k ** (2 ** params.ell) * (3 * formula.n_clauses) ** params.ell


def kprover_coverage(formula: Formula3CNF5, params: KProverParams, cap: Optional[int] = None) -> KProverCoverage:
    """
    Materialize the coverage function of the k-prover system on `formula`.

    Only valid answers (every clause query answered by a satisfying assignment)
    become items. Every item covers exactly |U|/k' elements.

    Args:
        formula: 3CNF-5 formula
        params: prover count, ell and codebook
        cap: largest |U| accepted (defaults to settings.kprover_universe_cap)

    Returns:
        KProverCoverage: coverage function, item list and construction sizes

    Raises:
        CapExceededError: if |U| is above the cap
    """
    cap = settings.kprover_universe_cap if cap is None else cap
    size = universe_size(formula, params)
    if size > cap:
        raise CapExceededError(f"Prover universe of {size} elements exceeds the cap of {cap}")

    k, ell = params.k, params.ell
    half = ell // 2
    L = 2 ** ell
    block_size = k ** L
    C = formula.n_clauses

    items: List[ProverItem] = []
    item_index: Dict[ProverItem, int] = {}
    answers_of: Dict[Tuple[int, ...], List[Tuple[int, ...]]] = {}
    for question in _questions(formula, half):
        answers_of[question] = _valid_answers(formula, question, half)
        for answer in answers_of[question]:
            for i in range(k):
                item = ProverItem(question, answer, i)
                item_index[item] = len(items)
                items.append(item)

    # position j of prover i's question: ("clause", rank) or ("variable", rank)
    layouts = []
    for word in params.codewords:
        clause_rank = variable_rank = 0
        layout = []
        for bit in word:
            if bit == "1":
                layout.append((True, clause_rank))
                clause_rank += 1
            else:
                layout.append((False, variable_rank))
                variable_rank += 1
        layouts.append(layout)

    covers = [0] * len(items)
    randomness = list(product(range(C), repeat=ell))
    positions = list(product(range(3), repeat=ell))
    r_index = 0
    for chosen in randomness:
        for picks in positions:
            offset = r_index * block_size
            distinguished = [formula.clause_variables(chosen[j])[picks[j]] for j in range(ell)]
            for i, layout in enumerate(layouts):
                clause_part = tuple(chosen[j] for j in range(ell) if params.codewords[i][j] == "1")
                variable_part = tuple(distinguished[j] for j in range(ell) if params.codewords[i][j] == "0")
                question = clause_part + variable_part
                for answer in answers_of[question]:
                    rho = 0
                    for j, (is_clause, rank) in enumerate(layout):
                        if is_clause:
                            bit = answer[3 * rank + picks[j]]
                        else:
                            bit = answer[3 * half + rank]
                        rho |= bit << j
                    covers[item_index[ProverItem(question, answer, i)]] |= _digit_mask(k, L, rho, i) << offset
            r_index += 1

    function = CoverageFn(size, covers)
    question_count = C ** half * formula.n_vars ** half
    logger.info(
        f"k-prover coverage: k={k}, ell={ell}, |Q|={question_count}, |R|={r_index}, "
        f"|U|={size}, items={len(items)}, k'={k * question_count}"
    )
    return KProverCoverage(
        formula=formula,
        params=params,
        function=function,
        items=items,
        question_count=question_count,
        randomness_count=r_index,
        item_index=item_index,
    )


@dataclass
class BlockClaimReport:
    unions_checked: int = 0
    families_checked: int = 0
    violations: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def _digits(k: int, L: int) -> np.ndarray:
    """Row p holds the L base-k digits of position p inside a slice U_r."""
    positions = np.arange(k ** L, dtype=np.int64)
    return np.stack([(positions // k ** j) % k for j in range(L)], axis=1)


def verify_block_claims(cov: KProverCoverage, samples: int, seed: Optional[int] = None) -> BlockClaimReport:
    """
    Check both block identities on sampled random states.

    For sampled (r, j) the union over provers of B(r, j, i) must be U_r. For sampled
    families I of (i, j) pairs with distinct j, the union of B(r, j, i) must have
    exactly k^L - (k-1)^|I| k^(L-|I|) elements, which is (1 - (1 - 1/k)^|I|) |U_r|.
    Bitmask unions are cross-checked against a direct count over the digit table.
    Samples run in parallel.
    """
    k, L = cov.params.k, cov.L
    rng = np.random.default_rng(seed)
    digits = _digits(k, L)
    draws = []
    for _ in range(samples):
        r = int(rng.integers(cov.randomness_count))
        j = int(rng.integers(L))
        width = int(rng.integers(1, L + 1))
        coordinates = sorted(int(x) for x in rng.choice(L, size=width, replace=False))
        provers = [int(x) for x in rng.integers(0, k, size=width)]
        draws.append((r, j, list(zip(provers, coordinates))))

    def check(draw) -> List[str]:
        r, j, family = draw
        problems = []
        union = 0
        for i in range(k):
            union |= cov.block(r, j, i)
        if union != cov.slice_mask(r) or union.bit_count() != k ** L:
            problems.append(f"union over provers at r={r}, j={j} is not U_r")

        family_union = 0
        for i, jj in family:
            family_union |= cov.block(r, jj, i)
        expected = k ** L - (k - 1) ** len(family) * k ** (L - len(family))
        counted = int(np.any(np.stack([digits[:, jj] == i for i, jj in family]), axis=0).sum())
        if family_union.bit_count() != expected or counted != expected:
            problems.append(
                f"family {[(i + 1, jj + 1) for i, jj in family]} at r={r} covers "
                f"{family_union.bit_count()} (counted {counted}), expected {expected}"
            )
        return problems

    report = BlockClaimReport()
    for problems in map_items(check, draws):
        report.unions_checked += 1
        report.families_checked += 1
        report.violations.extend(problems)
    if report.passed:
        logger.info(f"Block identities hold on {samples} sampled random states")
    else:
        logger.error(f"Block identities violated {len(report.violations)} times")
    return report


def singleton_value(cov: KProverCoverage) -> Fraction:
    """The common value 1/k' every item should have."""
    return Fraction(1, cov.k_prime)
