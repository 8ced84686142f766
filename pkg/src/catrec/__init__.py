"""Category recommendation from transaction logs.

Learns user and category embeddings by variational inference over a binary
transaction matrix and a temporally decayed affinity matrix, initialized from
metapath-based heterogeneous graph embeddings. Ships popularity, implicit-ALS,
BPR, and plain graph-embedding baselines plus a top-k ranking evaluation
harness.
"""

__version__ = "0.1.0"
