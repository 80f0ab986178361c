"""
Subcommand implementations.
Each handler turns an AnalysisRequest into a Report.
"""
from pathlib import Path
from typing import List, Optional

from gentlekit.algebra.blocks import (
    BlockDecomposition,
    DecompositionResult,
    decompose_blocks,
    format_potential,
    jacobian_quiver,
    jacobian_relations,
    parse_potential,
    potential_from_decomposition,
    verify_jacobian_equals,
)
from gentlekit.algebra.cohen_macaulay import (
    BAND_CAVEAT,
    cm_orbits,
    cm_report,
    radical_trichotomy,
    verify_2cy_necessary,
)
from gentlekit.algebra.linalg import ExactField, make_field
from gentlekit.algebra.quiver import (
    BoundQuiver,
    classify,
    critical_paths,
    format_bound_quiver,
    gentle_arrows,
    gorenstein_dimension_gentle,
    nonzero_paths,
    parse_bound_quiver,
    saturated_cycles,
    validate_admissible,
)
from gentlekit.algebra.representation import (
    DimensionResult,
    default_cutoff,
    global_dim,
    gorenstein_dimension_oracle,
    regular_representation,
)
from gentlekit.algebra.strings import format_string
from gentlekit.commands.registry import get_command_registry
from gentlekit.core.logging import get_logger
from gentlekit.exceptions import (
    ConsistencyError,
    FieldError,
    InputError,
    PreconditionError,
)
from gentlekit.schemas import (
    AnalysisRequest,
    AngulationSection,
    BlockModel,
    BlocksSection,
    ClassificationSection,
    CMSection,
    Command,
    DimensionModel,
    DimensionsSection,
    JacobianSection,
    Report,
    RunInfo,
    ViolationModel,
)
from gentlekit.services.suite_service import get_suite_service
from gentlekit.surfaces.angulation import (
    Angulation,
    is_angulation,
    parse_angulation,
    quiver_from_angulation,
    verify_angulation_properties,
)

logger = get_logger(__name__)


def dimension_model(result: DimensionResult) -> DimensionModel:
    return DimensionModel(kind=result.kind.value, value=result.value, period=result.period, start=result.start)


def _read(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as e:
        raise InputError(f"Cannot read {path}: {e.strerror}", details={"path": str(path)}) from None


class AnalysisService:
    """Service implementing the toolkit subcommands."""

    def __init__(self):
        self._register_commands()

    def _register_commands(self):
        """Register all subcommands."""
        registry = get_command_registry()

        registry.register_command(Command.ANALYZE.value, self.analyze)
        registry.register_command(Command.CM.value, self.cm)
        registry.register_command(Command.BLOCKS.value, self.blocks)
        registry.register_command(Command.JACOBIAN.value, self.jacobian)
        registry.register_command(Command.FROM_ANGULATION.value, self.from_angulation)
        registry.register_command(Command.SUITE.value, self.suite)

        logger.debug("Subcommands registered")

    # --- shared plumbing ---

    def _field(self, req: AnalysisRequest, jacobian: bool = False) -> ExactField:
        """The request's field, carrying its seed and trial count to the oracle."""
        return make_field(req.characteristic, jacobian=jacobian, trials=req.trials, seed=req.seed)

    def _run_info(self, req: AnalysisRequest, field: ExactField, bq: Optional[BoundQuiver] = None,
                  m: Optional[int] = None) -> RunInfo:
        cutoff = req.cutoff
        if cutoff is None and bq is not None and validate_admissible(bq).admissible:
            cutoff = default_cutoff(bq)
        return RunInfo(field=field.name, characteristic=req.characteristic, cutoff=cutoff, trials=req.trials,
                       seed=req.seed, max_letters=req.max_letters, m=m)

    def _load(self, req: AnalysisRequest) -> BoundQuiver:
        text = _read(req.input_path)
        if req.input_path.suffix == ".ang":
            return quiver_from_angulation(parse_angulation(text), name=req.input_path.stem)
        return parse_bound_quiver(text)

    def _classification(self, bq: BoundQuiver) -> ClassificationSection:
        report = classify(bq)
        admissibility = validate_admissible(bq)
        section = ClassificationSection(
            admissible=admissibility.admissible,
            max_path_length=admissibility.max_length,
            string=report.is_string,
            gentle=report.is_gentle,
            violations=[ViolationModel(tag=v.tag, witness=" ".join(v.witness)) for v in report.violations],
        )
        if report.is_gentle:
            section.gentle_arrows = list(gentle_arrows(bq))
            section.critical_paths = [str(p) for p in critical_paths(bq)[0]]
        return section

    def _blocks_section(self, bq: BoundQuiver, result: DecompositionResult) -> BlocksSection:
        section = BlocksSection(decomposable=result.ok, rule=result.rule, witness=list(result.witness))
        if classify(bq).is_gentle:
            necessary = verify_2cy_necessary(bq)
            section.necessary_conditions = {
                "gorenstein_at_most_one": necessary.gorenstein_at_most_one,
                "relations_on_cycles": necessary.relations_on_cycles,
                "cycles_are_triangles_or_loops": necessary.cycles_are_triangles_or_loops,
            }
        dec: Optional[BlockDecomposition] = result.decomposition
        if dec is not None:
            section.counts = dec.counts()
            section.blocks = [BlockModel(kind=b.kind.value, arrows=list(b.arrows), outlets=list(b.outlets))
                              for b in dec.blocks]
            section.matching = [[str(first), str(second)] for first, second in dec.matching]
        return section

    def _jacobian_sections(self, bq: BoundQuiver, potential, characteristics) -> List[JacobianSection]:
        sections = []
        for characteristic in characteristics:
            verdict = verify_jacobian_equals(bq, potential, characteristic)
            sections.append(JacobianSection(
                characteristic=characteristic,
                equal=verdict.equal,
                relations=[str(r) for r in jacobian_relations(bq, potential, characteristic)],
                missing=verdict.missing,
                extra=verdict.extra,
                vanished=verdict.vanished,
            ))
        return sections

    def _cm_section(self, bq: BoundQuiver, req: AnalysisRequest, m: int, field: ExactField) -> CMSection:
        report = cm_report(bq, m, req.max_letters, req.cutoff, field)
        section = CMSection(
            m=m,
            gorenstein=dimension_model(report.gorenstein),
            method=report.method.value,
            cm_modules=[format_string(e.word) for e in report.cm_modules],
            fixed_points=[format_string(e.word) for e in report.fixed_points],
            sets_agree=report.sets_agree,
            orbits=[[format_string(e.word) for e in orbit] for orbit in cm_orbits(bq, report.cm_modules)],
            formula_results=report.formula_results,
        )
        # the radical summand lemma covers gentle algebras only
        if classify(bq).is_gentle and report.gorenstein.is_finite and report.gorenstein.value >= 1:
            for vertex in bq.vertices:
                tagged = radical_trichotomy(bq, vertex, req.cutoff, field)
                section.trichotomy[vertex] = [f"{format_string(e.word)}: {tag.value}" for e, tag in tagged]
        return section

    # --- subcommands ---

    def analyze(self, req: AnalysisRequest) -> Report:
        """Classification, dimensions and saturated cycles."""
        field = self._field(req)
        bq = self._load(req)
        report = Report(command=req.command.value, algebra=bq.name, run=self._run_info(req, field, bq))
        report.classification = self._classification(bq)
        if not report.classification.admissible:
            report.caveats.append("the algebra is infinite-dimensional; dimensions were not computed")
            return report

        gorenstein = gorenstein_dimension_oracle(bq, req.cutoff, field)
        dimensions = DimensionsSection(
            algebra=len(nonzero_paths(bq)),
            gorenstein=dimension_model(gorenstein),
            global_dimension=dimension_model(global_dim(bq, req.cutoff, field)),
        )
        if report.classification.gentle:
            low, high = gorenstein_dimension_gentle(bq)
            dimensions.gorenstein_bounds = [low, high]
            if not (gorenstein.is_finite and low <= gorenstein.value <= high):
                raise ConsistencyError(
                    f"Oracle Gorenstein dimension {gorenstein} disagrees with the critical path bounds {low}..{high}")
            report.saturated_cycles = [str(c) for c in saturated_cycles(bq)]
        elif report.classification.string:
            report.saturated_cycles = [str(c) for c in saturated_cycles(bq)]
        report.dimensions = dimensions
        return report

    def cm(self, req: AnalysisRequest) -> Report:
        """CM set, fixed points of Omega^{m+1} tau, and whether they coincide."""
        field = self._field(req)
        bq = self._load(req)
        report = Report(command=req.command.value, algebra=bq.name, run=self._run_info(req, field, bq, req.m))
        report.cm = self._cm_section(bq, req, req.m, field)
        report.verified = report.cm.sets_agree
        report.caveats.append(BAND_CAVEAT)
        return report

    def blocks(self, req: AnalysisRequest) -> Report:
        """Block decomposition, optionally with the Jacobian check of its potential."""
        field = self._field(req)
        bq = self._load(req)
        report = Report(command=req.command.value, algebra=bq.name, run=self._run_info(req, field, bq))
        result = decompose_blocks(bq)
        report.blocks = self._blocks_section(bq, result)
        report.verified = result.ok
        if result.ok and req.potential:
            potential = potential_from_decomposition(result.decomposition)
            report.potential = format_potential(potential)
            report.jacobian = self._jacobian_sections(bq, potential, [req.characteristic])
            report.verified = all(j.equal for j in report.jacobian)
        return report

    def jacobian(self, req: AnalysisRequest) -> Report:
        """
        Do the cyclic derivatives of a potential generate the relations?

        The potential is read from --potential-file or built from the block
        decomposition. The oracle then builds the Jacobian algebra itself:
        its path basis must span its regular representation, and must be the
        path basis of the algebra whenever the relations agree. That needs a
        field that admits Jacobian computations.
        """
        bq = self._load(req)
        try:
            field = self._field(req, jacobian=True)
            oracle_field: Optional[ExactField] = field
        except FieldError as e:
            field = self._field(req)
            oracle_field = None
            refusal = e.message
        report = Report(command=req.command.value, algebra=bq.name, run=self._run_info(req, field, bq))

        if req.potential_file is not None:
            potential = parse_potential(bq, _read(req.potential_file))
        else:
            result = decompose_blocks(bq)
            report.blocks = self._blocks_section(bq, result)
            if not result.ok:
                raise PreconditionError(f"{bq.name} has no block decomposition: {result.rule}",
                                        details={"witness": list(result.witness)})
            potential = potential_from_decomposition(result.decomposition)
        report.potential = format_potential(potential)
        report.jacobian = self._jacobian_sections(bq, potential, [req.characteristic])
        section = report.jacobian[0]
        report.verified = section.equal

        if oracle_field is None:
            report.caveats.append(f"oracle cross-check skipped: {refusal}")
            return report
        jacobian_bq = jacobian_quiver(bq, potential, req.characteristic)
        if jacobian_bq is None:
            report.caveats.append("oracle cross-check skipped: the Jacobian ideal is not monomial")
        elif not validate_admissible(jacobian_bq).admissible:
            report.caveats.append("oracle cross-check skipped: the Jacobian algebra is infinite-dimensional")
        else:
            basis = [str(p) for p in nonzero_paths(jacobian_bq)]
            regular = regular_representation(jacobian_bq, oracle_field).total_dim
            if len(basis) != regular:
                raise ConsistencyError(
                    f"Jacobian path basis has {len(basis)} elements, its regular representation {regular}")
            section.jacobian_dimension = regular
            section.basis_matches = (validate_admissible(bq).admissible
                                     and sorted(basis) == sorted(str(p) for p in nonzero_paths(bq)))
            if section.equal and not section.basis_matches:
                raise ConsistencyError("The relations agree but the path bases of the two algebras differ")
        return report

    def from_angulation(self, req: AnalysisRequest) -> Report:
        """Bound quiver of an angulation, its structural properties, and the fixed-point criterion."""
        field = self._field(req)
        ang: Angulation = parse_angulation(_read(req.input_path))
        bq = quiver_from_angulation(ang, name=req.input_path.stem)
        m = ang.model.m
        report = Report(command=req.command.value, algebra=bq.name, run=self._run_info(req, field, bq, m))
        properties = verify_angulation_properties(ang, bq, req.cutoff, field)
        faces = is_angulation(ang.model, ang.diagonals).faces
        report.angulation = AngulationSection(
            model=str(ang.model),
            diagonals=[str(d) for d in ang.diagonals],
            faces=[list(f.corners) for f in faces],
            gentle=properties.gentle,
            cycles_have_length_m_plus_2=properties.cycles_have_length_m_plus_2,
            chains_at_most_m_minus_1=properties.chains_at_most_m_minus_1,
            gorenstein_at_most_m=properties.gorenstein_at_most_m,
            gorenstein=dimension_model(properties.gorenstein),
            global_dimension=dimension_model(properties.global_dimension),
            witnesses=properties.witnesses,
        )
        report.classification = self._classification(bq)
        report.saturated_cycles = [str(c) for c in saturated_cycles(bq)]
        report.emitted_bq = format_bound_quiver(bq)
        verified = properties.passed
        if properties.gentle:
            report.cm = self._cm_section(bq, req, m, field)
            verified = verified and report.cm.sets_agree
            report.caveats.append(BAND_CAVEAT)
        report.verified = verified
        if req.emit_bq is not None:
            req.emit_bq.write_text(report.emitted_bq)
            logger.info(f"Wrote {req.emit_bq}")
        return report

    def suite(self, req: AnalysisRequest) -> Report:
        field = self._field(req)
        report = Report(command=req.command.value, run=self._run_info(req, field, m=req.m))
        report.suite = get_suite_service().run(req, field)
        report.verified = not report.suite.failures
        return report


# Global service instance
_analysis_service: Optional[AnalysisService] = None


def get_analysis_service() -> AnalysisService:
    """Get the global analysis service instance."""
    global _analysis_service
    if _analysis_service is None:
        _analysis_service = AnalysisService()
    return _analysis_service
