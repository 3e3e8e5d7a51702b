"""Texture signatures from directed pixel networks and randomized neural networks."""

from .errors import (
    CnrnnError,
    DatasetError,
    NumericalError,
    PgmError,
    SingularMatrixError,
    UnsupportedPgmError,
)
from .evaluation import EvalReport, LdaModel, lda_fit, lda_predict, loocv
from .imagery import Dataset, GrayImage, LabeledSample, load_dataset, load_pgm, synth_texture, tile, write_pgm
from .netmodel import DegreeProfiles, degree_profiles, edge_weight, enumerate_edges, neighborhood
from .rnn import hidden_weights, lcg_sequence, output_weights, project, zscore_rows
from .signature import PRESETS, Signature, SignatureConfig, extract, extract_many, psi, theta, upsilon

__version__ = "0.1.0"
