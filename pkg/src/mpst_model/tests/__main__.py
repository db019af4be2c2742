# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

import os
import argparse

from mpst_model import __version__
from mpst_model.limits import ACCEPTANCE_VARIABLE


def get_parser():
    """
    Creates a new argument parser.
    """
    parser = argparse.ArgumentParser('mpst-model-tests')
    version = '%(prog)s ' + __version__
    parser.add_argument('--version', '-v', action='version', version=version)
    parser.add_argument('--fast', action='store_true', help='skip the corpus-level theorem suites')
    parser.add_argument('--acceptance', action='store_true', help='run the property suites at full size')
    return parser


def main(args=None):
    """
    Called with ``python -m mpst_model.tests``: run main test suite.
    """

    parser = get_parser()
    args = parser.parse_args(args)

    # Check if pytest is available
    try:
        import pytest
    except ImportError:
        raise SystemExit(
            'You need py.test to run the test suite.\n'
            'You can install it using your distribution package manager or\n'
            '    $ python -m pip install pytest --user'
        )

    if args.acceptance:
        os.environ[ACCEPTANCE_VARIABLE] = '1'

    import mpst_model.tests as test_module
    test_path = os.path.abspath(os.path.dirname(test_module.__file__))
    options = [test_path]
    if args.fast:
        options += ['--ignore', os.path.join(test_path, 'test_theorems.py')]
    raise SystemExit(pytest.main(options))


if __name__ == '__main__':
    main()
