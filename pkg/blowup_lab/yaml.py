""" load the libyaml safe loader when it is there, the pure python one otherwise """
# pylint: disable=unused-import
import yaml  # noqa: F401

try:
    from yaml import CSafeLoader as SafeLoader
except ImportError:
    from yaml import SafeLoader  # type: ignore # noqa: F401
