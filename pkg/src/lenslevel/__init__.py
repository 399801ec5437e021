"""lenslevel: infer photography expertise from Flickr-style multimodal records.

The package turns raw user/photo/comment tables into engineered feature
matrices, labels users from their self-reported occupation, trains four
from-scratch classifiers under stratified 10-fold cross-validation, and
produces correlation / ANOVA / MANOVA characterization reports.
"""

__version__ = "0.1.0"
