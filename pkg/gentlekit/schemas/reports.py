from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from gentlekit.config import get_settings


class RunInfo(BaseModel):
    """Effective options of a run, echoed for reproducibility"""
    field: str
    characteristic: int
    cutoff: Optional[int] = None
    trials: int
    seed: int
    max_letters: int
    m: Optional[int] = None


class ViolationModel(BaseModel):
    tag: str
    witness: str


class ClassificationSection(BaseModel):
    admissible: bool
    max_path_length: Optional[int] = None
    string: bool
    gentle: bool
    violations: List[ViolationModel] = []
    gentle_arrows: List[str] = []
    critical_paths: List[str] = []


class DimensionModel(BaseModel):
    kind: str
    value: Optional[int] = None
    period: Optional[int] = None
    start: Optional[int] = None


class DimensionsSection(BaseModel):
    algebra: int = Field(..., description="dim of the algebra, from path enumeration")
    gorenstein: DimensionModel
    gorenstein_bounds: Optional[List[int]] = Field(default=None, description="Critical path bounds, gentle only")
    global_dimension: DimensionModel


class CMSection(BaseModel):
    m: int
    gorenstein: DimensionModel
    method: str
    cm_modules: List[str]
    fixed_points: List[str]
    sets_agree: bool
    orbits: List[List[str]] = []
    formula_results: Dict[str, bool] = {}
    trichotomy: Dict[str, List[str]] = {}


class BlockModel(BaseModel):
    kind: str
    arrows: List[str]
    outlets: List[str]


class BlocksSection(BaseModel):
    decomposable: bool
    rule: Optional[str] = None
    witness: List[str] = []
    counts: Dict[str, int] = {}
    blocks: List[BlockModel] = []
    matching: List[List[str]] = []
    necessary_conditions: Dict[str, bool] = {}


class JacobianSection(BaseModel):
    characteristic: int
    equal: bool
    relations: List[str]
    missing: List[str] = []
    extra: List[str] = []
    vanished: List[str] = []
    jacobian_dimension: Optional[int] = Field(default=None, description="dim of the Jacobian algebra, by the oracle")
    basis_matches: Optional[bool] = Field(default=None, description="Same path basis as the algebra")


class AngulationSection(BaseModel):
    model: str
    diagonals: List[str]
    faces: List[List[int]]
    gentle: bool
    cycles_have_length_m_plus_2: bool
    chains_at_most_m_minus_1: bool
    gorenstein_at_most_m: bool
    gorenstein: DimensionModel
    global_dimension: DimensionModel
    witnesses: Dict[str, List[str]] = {}


class SuiteFailure(BaseModel):
    index: int
    instance: str = Field(..., description="Fixture file name, or 'seed <n>'")
    seed: Optional[int] = None
    reason: str


class SuiteSection(BaseModel):
    name: str
    count: int
    passed: int
    failures: List[SuiteFailure] = []
    parameters: Dict[str, Any] = {}


class Report(BaseModel):
    """The document printed by every subcommand"""
    tool: str = Field(default_factory=lambda: get_settings().app_name)
    version: str = Field(default_factory=lambda: get_settings().app_version)
    command: str
    algebra: Optional[str] = None
    run: RunInfo
    classification: Optional[ClassificationSection] = None
    dimensions: Optional[DimensionsSection] = None
    saturated_cycles: List[str] = []
    cm: Optional[CMSection] = None
    blocks: Optional[BlocksSection] = None
    potential: Optional[str] = None
    jacobian: List[JacobianSection] = []
    angulation: Optional[AngulationSection] = None
    suite: Optional[SuiteSection] = None
    emitted_bq: Optional[str] = None
    verified: bool = True
    caveats: List[str] = []
