import json
import logging
import os
from typing import Any, Dict, Optional

from barycentric_treecode.exceptions import ImproperlyConfigured
from barycentric_treecode.utils import (
    validate_degree,
    validate_epsilon,
    validate_leaf_size,
    validate_positive_int,
    validate_theta,
)

logger = logging.getLogger('barycentric_treecode')

SETTINGS_ENV = 'TREECODE_SETTINGS'
THREADS_ENV = 'TREECODE_THREADS'


def load_settings_file(path: str) -> Dict[str, Any]:
    """
    Loads a settings file and parses it to a python dict.

    :param path: path to a .json, .yml or .yaml file
    :return: file contents as a dict
    :raises: ImproperlyConfigured
    """
    if not os.path.isfile(path):
        logger.error('Path `%s` does not resolve as a valid file.', path)
        raise ImproperlyConfigured(f'The path `{path}` does not point to a valid settings file.')
    try:
        logger.debug('Reading settings from %s', path)
        with open(path, 'r') as f:
            content = f.read()
    except Exception as e:
        logger.exception('Exception raised when reading settings from %s. Error: %s', path, e)
        raise ImproperlyConfigured(f'Unable to read the settings file.\n\nError: {e}')
    if path.endswith('.json'):
        loaded = json.loads(content)
    elif path.endswith('.yaml') or path.endswith('.yml'):
        try:
            import yaml
        except ModuleNotFoundError:
            raise ImproperlyConfigured(
                'The package `PyYAML` is required for parsing yaml files. '
                'Please run `pip install PyYAML` to install it.'
            )
        loaded = yaml.load(content, Loader=yaml.FullLoader)
    else:
        raise ImproperlyConfigured('The settings path does not seem to point to a JSON or YAML file.')
    if loaded is None:
        return {}
    if not isinstance(loaded, dict):
        raise ImproperlyConfigured(f'The settings file `{path}` should contain a mapping, not {type(loaded)}.')
    return loaded


class TreecodeSettings(object):
    """
    Loads and validates the package settings.
    """

    def __init__(self, overrides: Optional[Dict[str, Any]] = None) -> None:
        """
        Initializes settings with base values, then applies the settings file and overrides.

        :param overrides: optional dict of settings, applied after the settings file
        """
        self.THETA = 0.7
        self.DEGREE = 7
        self.LEAF_SIZE: Optional[int] = None
        self.EPSILON: Optional[float] = None
        self.SHRINK = False
        self.THREADS = 1
        self.BLOCK_SIZE = 256
        self.DIRECT_BUDGET = 200_000
        self.ERROR_SAMPLE_SIZE = 2000

        _settings: Dict[str, Any] = {}
        if os.environ.get(SETTINGS_ENV):
            _settings.update(load_settings_file(os.environ[SETTINGS_ENV]))
        if overrides:
            _settings.update(overrides)

        if _settings:
            logger.debug('Loading settings.')
        for setting, value in _settings.items():
            if hasattr(self, setting) and setting.isupper():
                setattr(self, setting, value)
            else:
                logger.error('Found an excess key in the treecode settings: `%s`.', setting)
                raise ImproperlyConfigured(f'`{setting}` is not a valid setting for the barycentric-treecode package')

        if os.environ.get(THREADS_ENV):
            try:
                self.THREADS = int(os.environ[THREADS_ENV])
            except ValueError:
                raise ImproperlyConfigured(f'`{THREADS_ENV}` needs to be an integer, not `{os.environ[THREADS_ENV]}`.')

        logger.debug('Validating settings.')
        validate_theta(self.THETA)
        validate_degree(self.DEGREE)
        if self.LEAF_SIZE is not None:
            validate_leaf_size(self.LEAF_SIZE)
        if self.EPSILON is not None:
            validate_epsilon(self.EPSILON)
        if not isinstance(self.SHRINK, bool):
            raise ImproperlyConfigured('`SHRINK` needs to be True or False, or unspecified (defaults to False).')
        validate_positive_int(self.THREADS, 'THREADS')
        validate_positive_int(self.BLOCK_SIZE, 'BLOCK_SIZE')
        validate_positive_int(self.DIRECT_BUDGET, 'DIRECT_BUDGET')
        validate_positive_int(self.ERROR_SAMPLE_SIZE, 'ERROR_SAMPLE_SIZE')


settings = TreecodeSettings()
