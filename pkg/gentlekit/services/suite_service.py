"""
Seeded property batteries run by the `suite` subcommand.

Instance i of a run uses seed + i; the parity suite checks every .bq fixture
before its seeded instances. Failures are collected, never raised, so a run
always reports every instance in order.
"""
import random
from functools import partial
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from gentlekit.algebra.blocks import (
    BlockKind,
    block_structure_isomorphic,
    decompose_blocks,
    glue,
    potential_from_decomposition,
    random_block_instance,
    verify_jacobian_equals,
)
from gentlekit.algebra.cohen_macaulay import (
    cm_modules_gentle,
    cm_set,
    fixed_point_set,
    formula_check,
    verify_2cy_necessary,
)
from gentlekit.algebra.linalg import ExactField
from gentlekit.algebra.quiver import (
    BoundQuiver,
    classify,
    gorenstein_dimension_gentle,
    nonzero_paths,
    parse_bound_quiver,
    saturated_cycles,
    validate_admissible,
)
from gentlekit.algebra.representation import (
    cover_and_syzygy,
    decompose,
    regular_representation,
    rep_of_string,
)
from gentlekit.algebra.strings import (
    ModuleSum,
    enumerate_strings,
    format_string,
    iso,
    maximal_paths_uv,
    module_sum,
    path_word,
    string_entry,
    syzygy,
    tau_on_cycle,
)
from gentlekit.algebra.translate import cycle_position, tau_string
from gentlekit.config import get_settings
from gentlekit.core.logging import get_logger
from gentlekit.exceptions import AppException, VerificationFailure
from gentlekit.schemas import AnalysisRequest, SuiteFailure, SuiteName, SuiteSection
from gentlekit.surfaces.angulation import (
    AnnulusModel,
    DiskModel,
    quiver_from_angulation,
    random_angulation,
    verify_angulation_properties,
)

logger = get_logger(__name__)

JACOBIAN_CHARACTERISTICS = (0, 5, 10007)
ORACLE_SAMPLES = 2


def _expect(condition: bool, reason: str) -> None:
    if not condition:
        raise VerificationFailure(reason)


def _words(entries) -> List[str]:
    return [format_string(e.word) for e in entries]


class SuiteService:
    """Property batteries over generated instances."""

    def __init__(self):
        self._settings = get_settings()
        self._suites: Dict[SuiteName, Callable[[int, AnalysisRequest, ExactField], None]] = {
            SuiteName.BLOCKS: self._check_blocks,
            SuiteName.SATURATED: self._check_saturated,
            SuiteName.DISK: self._check_disk,
            SuiteName.ANNULUS: self._check_annulus,
            SuiteName.PARITY: self._check_parity,
        }

    def run(self, req: AnalysisRequest, field: ExactField) -> SuiteSection:
        count = self._settings.suite_count if req.count is None else req.count
        check = self._suites[req.suite]
        instances: List[Tuple[str, Optional[int], Callable[[], None]]] = []
        if req.suite == SuiteName.PARITY:
            for path in sorted(self._settings.fixtures_dir.glob("*.bq")):
                instances.append((path.name, None, partial(self._check_parity_fixture, path, req, field)))
        for index in range(count):
            seed = req.seed + index
            instances.append((f"seed {seed}", seed, partial(check, seed, req, field)))

        failures = []
        for index, (name, seed, thunk) in enumerate(instances):
            try:
                thunk()
            except AppException as e:
                reason = e.message
                logger.warning(f"{req.suite.value} instance {index} ({name}) failed: {reason}")
                failures.append(SuiteFailure(index=index, instance=name, seed=seed, reason=reason))
        parameters = {"seed": req.seed}
        if req.suite == SuiteName.DISK:
            parameters.update(n=req.n, m=req.m)
        elif req.suite == SuiteName.ANNULUS:
            parameters.update(m=req.m)
        elif req.suite == SuiteName.PARITY:
            parameters.update(max_letters=req.max_letters)
        return SuiteSection(name=req.suite.value, count=len(instances), passed=len(instances) - len(failures),
                            failures=failures, parameters=parameters)

    # --- batteries ---

    def _check_blocks(self, seed: int, req: AnalysisRequest, field: ExactField) -> None:
        """Glue then decompose; gentle, Gorenstein <= 1, Jacobian away from characteristic 3."""
        kinds, matching, bq = random_block_instance(seed)
        _, glued = glue(kinds, matching, name=bq.name)
        _expect(classify(bq).is_gentle, "glued algebra is not gentle")
        _expect(verify_2cy_necessary(bq).passed, "glued algebra fails the 2-CY tilted conditions")
        _expect(gorenstein_dimension_gentle(bq)[1] <= 1, "Gorenstein dimension exceeds 1")
        result = decompose_blocks(bq)
        _expect(result.ok, f"decomposition failed: {result.rule}")
        _expect(block_structure_isomorphic(glued, result.decomposition),
                "recovered blocks and matching differ from the glued ones")
        potential = potential_from_decomposition(result.decomposition)
        for characteristic in JACOBIAN_CHARACTERISTICS:
            _expect(verify_jacobian_equals(bq, potential, characteristic).equal,
                    f"Jacobian relations differ in characteristic {characteristic}")
        if BlockKind.LOOP in kinds:
            _expect(not verify_jacobian_equals(bq, potential, 3).equal,
                    "loop relation survived in characteristic 3")

    def _check_saturated(self, seed: int, req: AnalysisRequest, field: ExactField) -> None:
        """Omega and tau along saturated cycles, and the m = 1 fixed-point criterion."""
        _, _, bq = random_block_instance(seed)
        self.check_cycle_calculus(bq, req.max_letters, field, random.Random(seed))

    def check_cycle_calculus(self, bq: BoundQuiver, max_letters: int, field: Optional[ExactField] = None,
                             rng: Optional[random.Random] = None) -> None:
        """
        Omega and tau along every saturated cycle, then the m = 1 fixed points.

        With an rng the oracle only cross-checks one sampled cycle index and a
        few sampled strings outside the CM set; without one it checks them all.
        """
        cycles = saturated_cycles(bq)
        sampled = None
        if rng is not None and cycles:
            cycle = rng.choice(cycles)
            sampled = (cycle, rng.randrange(cycle.length))
        for cycle in cycles:
            data = maximal_paths_uv(bq, cycle)
            for i, (u, _) in enumerate(data):
                module = module_sum(bq, [string_entry(bq, path_word(bq, u))])
                following = module_sum(bq, [string_entry(bq, path_word(bq, data[(i + 1) % cycle.length][0]))])
                _expect(iso(syzygy(bq, module), following.non_projective()),
                        f"Omega M(u_{i}) is not M(u_{i + 1}) on {cycle}")
                if sampled is not None and sampled != (cycle, i):
                    continue
                by_oracle = tau_string(bq, module.entries[0], field, use_cycles=False)
                _expect(iso(by_oracle, tau_on_cycle(bq, cycle, i)), f"tau M(u_{i}) is not M(v_{i + 1}) on {cycle}")
        cm_modules = cm_modules_gentle(bq)
        for entry in cm_modules:
            _expect(formula_check(bq, entry, 1, field), f"Omega^2 tau fixes no {format_string(entry.word)}")
        fixed = fixed_point_set(bq, 1, max_letters, field)
        bounded = [e for e in cm_modules if len(e.word) <= max_letters]
        _expect(_words(fixed) == _words(bounded),
                f"fixed points {_words(fixed)} differ from CM modules {_words(bounded)}")

        cm_words = {e.word for e in cm_modules}
        outside = [string_entry(bq, w) for w in enumerate_strings(bq, max_letters)]
        outside = [e for e in outside if not e.is_projective and e.word not in cm_words]
        if rng is not None:
            outside = rng.sample(outside, min(ORACLE_SAMPLES, len(outside)))
        for entry in outside:
            _expect(not formula_check(bq, entry, 1, field),
                    f"{format_string(entry.word)} is fixed by Omega^2 tau but is not CM")

    def _check_angulation(self, ang, req: AnalysisRequest, field: ExactField) -> BoundQuiver:
        bq = quiver_from_angulation(ang)
        properties = verify_angulation_properties(ang, bq, req.cutoff, field)
        _expect(properties.passed, f"angulation properties fail: {properties.witnesses}")
        cm_modules, _ = cm_set(bq, req.max_letters, req.cutoff, field)
        fixed = fixed_point_set(bq, ang.model.m, req.max_letters, field)
        bounded = [e for e in cm_modules if len(e.word) <= req.max_letters]
        _expect(_words(fixed) == _words(bounded), f"fixed points {_words(fixed)} differ from CM set {_words(bounded)}")
        return bq

    def _check_disk(self, seed: int, req: AnalysisRequest, field: ExactField) -> None:
        model = DiskModel(req.n, req.m)
        ang = random_angulation(model, seed)
        _expect(len(ang.diagonals) == model.n - 1, "wrong number of diagonals")
        bq = self._check_angulation(ang, req, field)
        if model.m == 1:
            _expect(verify_2cy_necessary(bq).passed, "triangulation algebra fails the 2-CY tilted conditions")
            result = decompose_blocks(bq)
            _expect(result.ok and BlockKind.LOOP not in result.decomposition.kinds(),
                    "triangulation algebra has no loop-free block decomposition")

    def _check_annulus(self, seed: int, req: AnalysisRequest, field: ExactField) -> None:
        rng = random.Random(seed)
        model = AnnulusModel(rng.randint(1, 2), rng.randint(1, 2), req.m)
        self._check_angulation(random_angulation(model, seed), req, field)

    def _check_parity(self, seed: int, req: AnalysisRequest, field: ExactField) -> None:
        _, _, bq = random_block_instance(seed, max_blocks=5)
        self.check_parity(bq, req.max_letters, field)

    def _check_parity_fixture(self, path: Path, req: AnalysisRequest, field: ExactField) -> None:
        self.check_parity(parse_bound_quiver(path.read_text()), req.max_letters, field)

    def check_parity(self, bq: BoundQuiver, max_letters: int, field: Optional[ExactField] = None) -> None:
        """
        Combinatorial answers against the representation oracle.

        dim of the algebra for every admissible input; Omega of every string
        up to max_letters for string algebras; tau where the cycle formula
        applies.
        """
        if not validate_admissible(bq).admissible:
            return
        regular = regular_representation(bq, field).total_dim
        _expect(regular == len(nonzero_paths(bq)), f"dim of the algebra: {regular} by oracle")
        if not classify(bq).is_string:
            return
        for word in enumerate_strings(bq, max_letters):
            entry = string_entry(bq, word)
            if entry.is_projective:
                continue
            module = module_sum(bq, [entry])
            kernel = cover_and_syzygy(rep_of_string(bq, word, field)).kernel
            by_oracle: ModuleSum = decompose(kernel) if kernel.total_dim else ModuleSum()
            _expect(iso(by_oracle.non_projective(), syzygy(bq, module)),
                    f"Omega {format_string(word)} differs from the oracle")
            if cycle_position(bq, entry) is not None:
                _expect(iso(tau_string(bq, entry, field), tau_string(bq, entry, field, use_cycles=False)),
                        f"tau {format_string(word)} differs from the oracle")


# Global service instance
_suite_service: Optional[SuiteService] = None


def get_suite_service() -> SuiteService:
    """Get the global suite service instance."""
    global _suite_service
    if _suite_service is None:
        _suite_service = SuiteService()
    return _suite_service
