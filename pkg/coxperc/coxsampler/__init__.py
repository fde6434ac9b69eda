from .points import MarkedPointSet
from .sampler import attach_marks, sample_cox, sample_marked, thin
