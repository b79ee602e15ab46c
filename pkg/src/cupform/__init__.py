"""Exact analysis of intersection forms: derivative hypermatrices, rank-one loci, blow-ups."""

from cupform.analysis import (
    WfPoint,
    hessian_at,
    hessian_symbolic,
    honest,
    is_wf_member,
    nondegenerate,
    normal_form_at,
    peel,
    pure_power_test,
    wf_search,
)
from cupform.errors import CupformError
from cupform.exactpoly import Form, LinearChange, ProjPoint
from cupform.geometry import (
    BlowupSpec,
    IntersectionData,
    blowup_form,
    blowup_point,
    candidate_exceptionals,
    exceptional_rank_report,
    form_from_intersection,
    hessian_basis_identity_check,
    intersection_from_form,
)
from cupform.kernels import BACKEND
from cupform.tensor import HyperTensor, cayley_hyperdet_222, lemma_trick_bound, rank_222, rank_bounds

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BlowupSpec",
    "CupformError",
    "Form",
    "HyperTensor",
    "IntersectionData",
    "LinearChange",
    "ProjPoint",
    "WfPoint",
    "blowup_form",
    "blowup_point",
    "candidate_exceptionals",
    "cayley_hyperdet_222",
    "exceptional_rank_report",
    "form_from_intersection",
    "hessian_at",
    "hessian_basis_identity_check",
    "hessian_symbolic",
    "honest",
    "intersection_from_form",
    "is_wf_member",
    "lemma_trick_bound",
    "nondegenerate",
    "normal_form_at",
    "peel",
    "pure_power_test",
    "rank_222",
    "rank_bounds",
    "wf_search",
]
