"""Local certification protocols and the one-round verification harness."""

from .composite import CompositeCert, prove_election_prediction, verify_election_prediction
from .count_ones import TreeCert, prove_count_ones, verify_count_ones
from .election_pred import ChangeCert, ProverRefusal, prove_election_pred, verify_election_pred
from .harness import NodeView, Reject, Verdict, run_verifier

__all__ = [
    "ChangeCert",
    "CompositeCert",
    "NodeView",
    "ProverRefusal",
    "Reject",
    "TreeCert",
    "Verdict",
    "prove_count_ones",
    "prove_election_pred",
    "prove_election_prediction",
    "run_verifier",
    "verify_count_ones",
    "verify_election_pred",
    "verify_election_prediction",
]
