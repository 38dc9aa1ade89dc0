"""blognet: preprocessing and analysis toolkit for blog networks.

Three tracks share one typed data model: content (text normalization,
TF-IDF, cosine similarity), structure (link-graph extraction, cleaning,
component analysis, rankings), and profiles (demographic, temporal, and
comment statistics). The ``blognet`` CLI orchestrates them as inspectable
pipeline stages.
"""

__version__ = "0.1.0"
