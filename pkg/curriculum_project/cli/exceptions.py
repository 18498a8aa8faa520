from curriculum_project.exceptions import CurriculumError


class ConfigError(CurriculumError):
    """Class to generate exceptions for an invalid run configuration, listed field by field."""

    default_detail = 'Invalid configuration'
    default_code = 'invalid_config'


class OutputExists(CurriculumError):
    default_detail = 'Output directory is not empty, pass --force to overwrite'
    default_code = 'output_exists'
