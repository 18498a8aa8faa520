from curriculum_project.exceptions import CurriculumError


class FeatureIndexError(CurriculumError):
    default_detail = 'Feature index outside the model dimension'
    default_code = 'feature_index'


class NonFiniteGradient(CurriculumError):
    """Class to generate exceptions for NaN/Inf gradients, which abort the run."""

    default_detail = 'Non-finite gradient'
    default_code = 'non_finite_gradient'


class CheckpointFormatError(CurriculumError):
    default_detail = 'Unreadable model checkpoint'
    default_code = 'checkpoint_format'


class ProbeError(CurriculumError):
    """Class to generate exceptions for a probe subset too small to cover every class."""

    default_detail = 'Probe subset too small'
    default_code = 'probe_error'
