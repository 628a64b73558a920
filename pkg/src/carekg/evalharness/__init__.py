from .metrics import f1_scores, auc_ovr_macro, classification_report
from .splits import Split, make_split

__all__ = ["f1_scores", "auc_ovr_macro", "classification_report", "Split", "make_split"]
