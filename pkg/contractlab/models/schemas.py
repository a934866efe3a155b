from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator

from ..core.numeric import parse_number

# JSON numbers arrive as ints or, for decimals, as strings (floats are parsed as text
# so that 0.3 stays 3/10); "p/q" strings and "inf" are accepted as well.
Num = Union[int, float, str]

ALLOWED_MODELS = ("multi-agent", "multi-action")
ALLOWED_NUMERIC = ("rational", "real")


def _check_numbers(values: List[Num]) -> List[Num]:
    for value in values:
        parse_number(value)
    return values


class GraphDocument(BaseModel):
    vertices: int = Field(..., ge=0, description="Vertex count", examples=[3])
    edges: List[List[int]] = Field(default_factory=list, description="1-based vertex pairs",
                                   examples=[[[1, 2], [2, 3], [1, 3]]])

    @model_validator(mode='after')
    def validate_edges(self):
        for edge in self.edges:
            if len(edge) != 2:
                raise ValueError(f"Invalid edge {edge}: expected two endpoints")
            u, v = edge
            if not (1 <= u <= self.vertices and 1 <= v <= self.vertices):
                raise ValueError(f"Invalid edge {edge}: endpoints must lie in 1..{self.vertices}")
            if u == v:
                raise ValueError(f"Invalid edge {edge}: self-loops are not allowed")
        return self


class FormulaDocument(BaseModel):
    n_vars: int = Field(..., ge=3, description="Variable count (multiple of 3)", examples=[3])
    clauses: List[List[int]] = Field(..., description="Signed 1-based literals, three per clause")

    @model_validator(mode='after')
    def validate_clauses(self):
        for index, clause in enumerate(self.clauses):
            if len(clause) != 3:
                raise ValueError(f"Invalid clause {index + 1}: expected 3 literals, got {len(clause)}")
            if any(lit == 0 or abs(lit) > self.n_vars for lit in clause):
                raise ValueError(f"Invalid clause {index + 1}: literals must lie in ±1..±{self.n_vars}")
        return self


class _FunctionBase(BaseModel):
    normalize_by: Num = Field(default=1, description="f is divided by this positive scalar")

    @field_validator("normalize_by")
    @classmethod
    def validate_scale(cls, value):
        if not parse_number(value) > 0:
            raise ValueError(f"Invalid normalize_by: {value}. Must be positive")
        return value


class AdditiveDocument(_FunctionBase):
    kind: Literal["additive"] = "additive"
    weights: List[Num]

    check_weights = field_validator("weights")(_check_numbers)


class CoverageDocument(_FunctionBase):
    kind: Literal["coverage"] = "coverage"
    universe_size: int = Field(..., ge=1)
    covers: List[List[int]] = Field(..., description="1-based universe elements covered by each item")

    @model_validator(mode='after')
    def validate_covers(self):
        for index, elements in enumerate(self.covers):
            bad = [u for u in elements if not 1 <= u <= self.universe_size]
            if bad:
                raise ValueError(f"Invalid cover of item {index + 1}: elements {bad} outside 1..{self.universe_size}")
        return self


class XosDocument(_FunctionBase):
    kind: Literal["xos"] = "xos"
    clauses: List[List[Num]] = Field(..., min_length=1)

    @model_validator(mode='after')
    def validate_clauses(self):
        lengths = {len(clause) for clause in self.clauses}
        if len(lengths) != 1:
            raise ValueError(f"Invalid clauses: lengths {sorted(lengths)} differ")
        for clause in self.clauses:
            _check_numbers(clause)
        return self


class TableDocument(_FunctionBase):
    kind: Literal["table"] = "table"
    values: List[Num] = Field(..., description="f by bitmask, bit i-1 standing for item i")
    empty_value: Optional[Num] = None

    check_values = field_validator("values")(_check_numbers)


class HiddenSetDocument(_FunctionBase):
    kind: Literal["hidden-set"] = "hidden-set"
    n: int = Field(..., ge=1)
    good: List[int] = Field(..., description="1-based hidden good agents")


class CliqueXosDocument(_FunctionBase):
    kind: Literal["clique-xos"] = "clique-xos"
    graph: GraphDocument
    delta: int = Field(..., ge=1)
    beta: Num


class PseudoSymmetricDocument(_FunctionBase):
    kind: Literal["pseudo-symmetric"] = "pseudo-symmetric"
    profile: List[Num] = Field(..., description="h(0), ..., h(n)")
    special_set: List[int] = Field(..., description="1-based special set T")
    bonus: Num = 0

    check_profile = field_validator("profile")(_check_numbers)


SetFunctionDocument = Annotated[
    Union[
        AdditiveDocument,
        CoverageDocument,
        XosDocument,
        TableDocument,
        HiddenSetDocument,
        CliqueXosDocument,
        PseudoSymmetricDocument,
    ],
    Field(discriminator="kind"),
]


class InstanceDocument(BaseModel):
    model: str = Field(..., description="multi-agent or multi-action", examples=["multi-agent"])
    numeric: Optional[str] = Field(default=None, description="rational or real; inferred when omitted")
    costs: List[Num]
    f: SetFunctionDocument
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode='after')
    def validate_inputs(self):
        if self.model not in ALLOWED_MODELS:
            raise ValueError(f"Invalid model: {self.model}. Allowed values: {list(ALLOWED_MODELS)}")
        if self.numeric is not None and self.numeric not in ALLOWED_NUMERIC:
            raise ValueError(f"Invalid numeric: {self.numeric}. Allowed values: {list(ALLOWED_NUMERIC)}")
        _check_numbers(self.costs)
        return self


Rendered = Union[str, float]


class MultiAgentSolutionDocument(BaseModel):
    model: Literal["multi-agent"] = "multi-agent"
    S: List[int] = Field(..., description="1-based agents asked to exert effort")
    payments: List[Rendered]
    objective: Rendered
    objective_value: float
    method: str = "exact"
    metadata: Dict[str, Any] = Field(default_factory=dict)


class MultiActionSolutionDocument(BaseModel):
    model: Literal["multi-action"] = "multi-action"
    alpha: Rendered
    alpha_value: float
    best_response: List[int] = Field(..., description="1-based actions the agent takes at alpha")
    principal_utility: Rendered
    principal_utility_value: float
    metadata: Dict[str, Any] = Field(default_factory=dict)


class CliqueReportDocument(BaseModel):
    omega_estimate: int
    verdicts: Dict[str, str] = Field(default_factory=dict, description="verdict per delta")
    alphas: Dict[str, Rendered] = Field(default_factory=dict, description="oracle alpha per delta")
    oracle: str
    beta: Rendered


class SuccessEstimateDocument(BaseModel):
    n: int
    m: int
    set_size: int
    trials: int
    seed: int
    successes: int
    rate: float
    stderr: float
    ci_low: float = Field(..., description="95% Clopper-Pearson interval")
    ci_high: float
    exact_tail: float = Field(..., description="Hypergeometric Pr[|S & G| > sqrt(m)] when |S|^2 <= n")
    bound: Optional[float] = None
    within_bound: Optional[bool] = None
