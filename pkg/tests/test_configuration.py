import json

import pytest

from barycentric_treecode.configuration import TreecodeSettings, load_settings_file
from barycentric_treecode.exceptions import ImproperlyConfigured


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    monkeypatch.delenv('TREECODE_SETTINGS', raising=False)
    monkeypatch.delenv('TREECODE_THREADS', raising=False)


def test_default_settings() -> None:
    """
    Defaults are the headline configuration.
    """
    settings = TreecodeSettings()
    assert settings.THETA == 0.7
    assert settings.DEGREE == 7
    assert settings.LEAF_SIZE is None
    assert settings.EPSILON is None
    assert settings.SHRINK is False
    assert settings.THREADS == 1
    assert settings.BLOCK_SIZE == 256
    assert settings.DIRECT_BUDGET == 200_000
    assert settings.ERROR_SAMPLE_SIZE == 2000


def test_valid_overrides() -> None:
    settings = TreecodeSettings({'THETA': 0.5, 'DEGREE': 9, 'LEAF_SIZE': 1000, 'EPSILON': 0.3, 'SHRINK': True})
    assert (settings.THETA, settings.DEGREE, settings.LEAF_SIZE, settings.EPSILON, settings.SHRINK) == (
        0.5,
        9,
        1000,
        0.3,
        True,
    )


def test_excess_settings() -> None:
    """
    An error should be raised if an excess setting is specified.
    """
    for key in ['bad_setting', 'theta', 'CASE']:
        with pytest.raises(ImproperlyConfigured, match='is not a valid setting for the barycentric-treecode package'):
            TreecodeSettings({key: 5})


def test_invalid_values() -> None:
    """
    Values are validated when the settings are loaded.
    """
    for overrides, message in [
        ({'THETA': 1.5}, 'Theta `1.5` is invalid'),
        ({'THETA': 0}, 'Theta `0` is invalid'),
        ({'DEGREE': 0}, 'Degree `0` is invalid'),
        ({'DEGREE': 21}, 'Degree `21` is invalid'),
        ({'LEAF_SIZE': 0}, 'Leaf size `0` is invalid'),
        ({'EPSILON': -0.1}, 'Epsilon `-0.1` is invalid'),
        ({'THREADS': 0}, '`THREADS` needs to be a positive integer'),
        ({'BLOCK_SIZE': 'big'}, '`BLOCK_SIZE` needs to be a positive integer'),
    ]:
        with pytest.raises(ImproperlyConfigured, match=message):
            TreecodeSettings(overrides)


def test_shrink_setting() -> None:
    """
    Make sure all states are OK.
    """
    for value in [True, False]:
        assert TreecodeSettings({'SHRINK': value}).SHRINK is value
    for value in [0, 'yes', None]:
        with pytest.raises(ImproperlyConfigured, match='`SHRINK` needs to be True or False'):
            TreecodeSettings({'SHRINK': value})


def test_yaml_settings_file(monkeypatch, tmp_path) -> None:
    path = tmp_path / 'treecode.yml'
    path.write_text('THETA: 0.5\nDEGREE: 5\n')
    monkeypatch.setenv('TREECODE_SETTINGS', str(path))
    settings = TreecodeSettings()
    assert settings.THETA == 0.5
    assert settings.DEGREE == 5


def test_json_settings_file(monkeypatch, tmp_path) -> None:
    path = tmp_path / 'treecode.json'
    path.write_text(json.dumps({'LEAF_SIZE': 500}))
    monkeypatch.setenv('TREECODE_SETTINGS', str(path))
    assert TreecodeSettings().LEAF_SIZE == 500


def test_overrides_win_over_settings_file(monkeypatch, tmp_path) -> None:
    path = tmp_path / 'treecode.json'
    path.write_text(json.dumps({'DEGREE': 3}))
    monkeypatch.setenv('TREECODE_SETTINGS', str(path))
    assert TreecodeSettings({'DEGREE': 9}).DEGREE == 9


def test_bad_settings_files(tmp_path) -> None:
    """
    Unreadable or malformed settings files raise ImproperlyConfigured.
    """
    with pytest.raises(ImproperlyConfigured, match='does not point to a valid settings file'):
        load_settings_file(str(tmp_path / 'missing.yml'))

    text_file = tmp_path / 'treecode.txt'
    text_file.write_text('THETA = 0.5')
    with pytest.raises(ImproperlyConfigured, match='does not seem to point to a JSON or YAML file'):
        load_settings_file(str(text_file))

    list_file = tmp_path / 'treecode.json'
    list_file.write_text('[1, 2]')
    with pytest.raises(ImproperlyConfigured, match='should contain a mapping'):
        load_settings_file(str(list_file))


def test_empty_yaml_file(tmp_path) -> None:
    path = tmp_path / 'empty.yaml'
    path.write_text('')
    assert load_settings_file(str(path)) == {}


def test_thread_environment_variable(monkeypatch) -> None:
    monkeypatch.setenv('TREECODE_THREADS', '4')
    assert TreecodeSettings().THREADS == 4

    monkeypatch.setenv('TREECODE_THREADS', 'four')
    with pytest.raises(ImproperlyConfigured, match='`TREECODE_THREADS` needs to be an integer'):
        TreecodeSettings()
