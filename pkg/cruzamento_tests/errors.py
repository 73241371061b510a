#!/usr/bin/env python
#
# Copyright 2026 the Cruzamento developers
#
# This file is part of Cruzamento.
#
# Cruzamento is free software: you can redistribute it and/or modify it under
# the terms of the GNU Lesser General Public License as published by the Free
# Software Foundation, either version 3 of the License, or (at your option) any
# later version.
#
# Cruzamento is distributed in the hope that it will be useful, but WITHOUT ANY
# WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR
# A PARTICULAR PURPOSE. See the GNU Lesser General Public License for more
# details.
#
# You should have received a copy of the GNU Lesser General Public License
# along with Cruzamento.  If not, see <http://www.gnu.org/licenses/>.
import unittest

import inelegant.finder

from cruzamento import errors
from cruzamento.errors import (
    BackendError, CruzamentoError, DatabaseError, RepairExhausted,
    RetriesExhausted, TrainingDiverged, UsageError, ValidationError)
from cruzamento.roadnet.network import ValidationReport, Violation


class TestExitCodes(unittest.TestCase):

    def test_families(self):
        """
        Each family of errors should have its own exit code.
        """
        self.assertEqual(1, UsageError('x').exit_code)
        self.assertEqual(2, ValidationError('x').exit_code)
        self.assertEqual(3, BackendError('x').exit_code)

    def test_all_are_cruzamento_errors(self):
        """
        Every error should be caught by catching ``CruzamentoError``.
        """
        for e in (UsageError('x'), DatabaseError('x', 1),
                  RetriesExhausted(3), TrainingDiverged({'loss': 'nan'})):
            self.assertIsInstance(e, CruzamentoError)

    def test_str_without_message(self):
        """
        An error without a message should print as an empty string.
        """
        self.assertEqual('', str(CruzamentoError()))


class TestRepairExhausted(unittest.TestCase):

    def test_with_report(self):
        """
        The last validation report should be kept and printed.
        """
        report = ValidationReport([
            Violation('degenerate', ('x',), 'lane is 0.5 m long', 0.5)])

        e = RepairExhausted(3, report)

        self.assertIs(report, e.report)
        self.assertEqual(3, e.rounds)
        self.assertIn('degenerate x', str(e))

    def test_with_parse_error(self):
        """
        Without any report the parse error should be told instead.
        """
        e = RepairExhausted(2, parse_error='no XML found')

        self.assertIsNone(e.report)
        self.assertEqual(
            'network: no valid network after 2 rounds: no XML found', str(e))


class TestTrainingDiverged(unittest.TestCase):

    def test_diagnostics_sorted(self):
        """
        Diagnostics should be printed sorted by name.
        """
        e = TrainingDiverged({'loss': 'nan', 'epoch': 3})

        self.assertEqual(
            'training: non-finite loss: epoch=3, loss=nan', str(e))


load_tests = inelegant.finder.TestFinder(
    __name__,
    errors
).load_tests

if __name__ == "__main__":
    unittest.main()
