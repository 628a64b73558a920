from .train_config import TrainConfig
from .compile import compile_rgcn_graph, compile_entity_graph, strip_literal_triples
from .transe import transe_score, transe_train
from .rdf2vec import random_walks, cbow_train, rdf2vec_train
from .rgcn import RGCNConfig, RGCNParams, encode_literal, rgcn_forward, rgcn_train
from .persist import save_checkpoint, load_checkpoint, export_embeddings

__all__ = [
    "TrainConfig",
    "compile_rgcn_graph", "compile_entity_graph", "strip_literal_triples",
    "transe_score", "transe_train",
    "random_walks", "cbow_train", "rdf2vec_train",
    "RGCNConfig", "RGCNParams", "encode_literal", "rgcn_forward", "rgcn_train",
    "save_checkpoint", "load_checkpoint", "export_embeddings",
]
