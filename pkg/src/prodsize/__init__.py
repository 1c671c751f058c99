"""Field-standardized research productivity and returns-to-size analysis."""

from .classify import ContingencyTable2x2, SdsFrame, build_frame, contingency, dichotomize, label_scientists
from .config import RunConfig, config_from_file, load_uda_map
from .dataset import (
    AuthorRef,
    Dataset,
    DatasetError,
    PublicationRecord,
    StaffRecord,
    average_research_staff,
    load_dataset,
    load_publications,
    load_roster,
    validate,
)
from .pipeline import Report, SdsResult, run_analysis, write_report
from .scoring import (
    AuthorWeights,
    Baselines,
    ScientistScore,
    UnitScore,
    author_weights,
    compute_baselines,
    compute_scientist_scores,
    compute_unit_scores,
    standardized_impact,
    unit_fraction,
)
from .stats import (
    AssociationResult,
    LoessFit,
    QuartileGroups,
    chi_square_sf,
    detect_outliers_residual,
    g_test,
    kendall_tau_b_2x2,
    loess_fit,
    npc_test,
    quartile_split,
)
from .synth import GroundTruth, WorldConfig, generate_world, world_to_files

__version__ = "0.1.0"

__all__ = [
    "AssociationResult",
    "AuthorRef",
    "AuthorWeights",
    "Baselines",
    "ContingencyTable2x2",
    "Dataset",
    "DatasetError",
    "GroundTruth",
    "LoessFit",
    "PublicationRecord",
    "QuartileGroups",
    "Report",
    "RunConfig",
    "ScientistScore",
    "SdsFrame",
    "SdsResult",
    "StaffRecord",
    "UnitScore",
    "WorldConfig",
    "author_weights",
    "average_research_staff",
    "build_frame",
    "chi_square_sf",
    "compute_baselines",
    "compute_scientist_scores",
    "compute_unit_scores",
    "config_from_file",
    "contingency",
    "detect_outliers_residual",
    "dichotomize",
    "g_test",
    "generate_world",
    "kendall_tau_b_2x2",
    "label_scientists",
    "load_dataset",
    "load_publications",
    "load_roster",
    "load_uda_map",
    "loess_fit",
    "npc_test",
    "quartile_split",
    "run_analysis",
    "standardized_impact",
    "unit_fraction",
    "validate",
    "world_to_files",
    "write_report",
]
