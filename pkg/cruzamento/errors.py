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
"""
Errors are exceptions that, when raised, carry the outcome they represent. The
command line turns them into exit codes and messages on standard error.
"""

USAGE = 1
VALIDATION = 2
BACKEND = 3


class CruzamentoError(Exception):
    """
    Superclass exception for every error Cruzamento raises on purpose. It
    expects a message and, optionally, the exit code the command line should
    finish with::

        >>> e = CruzamentoError('something went wrong', exit_code=4)
        >>> e.message
        'something went wrong'
        >>> e.exit_code
        4

    By default it is reported as a usage problem::

        >>> CruzamentoError('oops').exit_code
        1
    """

    def __init__(self, message=None, exit_code=USAGE, *args):
        Exception.__init__(self, message, *args)

        self.message = message
        self.exit_code = exit_code

    def __str__(self):
        return self.message if self.message is not None else ''


class UsageError(CruzamentoError):
    """
    The command was called the wrong way::

        >>> UsageError('--count must be positive').exit_code
        1
    """

    def __init__(self, message=None, *args):
        CruzamentoError.__init__(self, message, USAGE, *args)


class ParameterError(UsageError):
    """
    Some parameter is outside its documented range::

        >>> e = ParameterError('radius', 5.0, (10, 50))
        >>> str(e)
        'radius=5.0 is outside [10, 50]'
    """

    def __init__(self, name, value, bounds=None, message=None):
        if message is None:
            message = '{0}={1!r} is outside [{2}, {3}]'.format(
                name, value, bounds[0], bounds[1])
        UsageError.__init__(self, message)
        self.name = name
        self.value = value
        self.bounds = bounds


class ValidationError(CruzamentoError):
    """
    Some input does not respect an invariant. The offending field is named by
    ``field_path``::

        >>> e = ValidationError('too many vehicles', field_path='vehicles')
        >>> e.exit_code
        2
        >>> e.field_path
        'vehicles'
        >>> str(e)
        'vehicles: too many vehicles'
    """

    def __init__(self, message=None, field_path=None, *args):
        if field_path is not None:
            full_message = '{0}: {1}'.format(field_path, message)
        else:
            full_message = message
        CruzamentoError.__init__(self, full_message, VALIDATION, *args)
        self.field_path = field_path


class SchemaVersionError(ValidationError):
    """
    The scenario file was written with another schema version::

        >>> str(SchemaVersionError(7, 1))
        'version: schema version 7 is not supported (expected 1)'
    """

    def __init__(self, found, expected):
        ValidationError.__init__(
            self,
            'schema version {0} is not supported (expected {1})'.format(
                found, expected),
            field_path='version')
        self.found = found
        self.expected = expected


class MalformedXml(ValidationError):
    """
    The network text is not well-formed XML. The position of the problem is
    kept::

        >>> e = MalformedXml('mismatched tag', line=3, column=7)
        >>> str(e)
        'line 3, column 7: mismatched tag'
    """

    def __init__(self, message, line=None, column=None):
        ValidationError.__init__(
            self, message,
            field_path='line {0}, column {1}'.format(line, column))
        self.line = line
        self.column = column


class DanglingReference(ValidationError):
    """
    Some element references an id that does not exist::

        >>> str(DanglingReference('c0', 'lane', 'nowhere'))
        "c0: references unknown lane 'nowhere'"
    """

    def __init__(self, element_id, kind, missing_id):
        ValidationError.__init__(
            self, 'references unknown {0} {1!r}'.format(kind, missing_id),
            field_path=element_id)
        self.element_id = element_id
        self.kind = kind
        self.missing_id = missing_id


class GeometryViolation(ValidationError):
    """
    Some element has an impossible geometry or attribute::

        >>> str(GeometryViolation('a', 'width must be positive'))
        'a: width must be positive'
    """

    def __init__(self, element_id, message):
        ValidationError.__init__(self, message, field_path=element_id)
        self.element_id = element_id


class NetworkRejected(ValidationError):
    """
    A network was parsed but its validation report is not empty. The report is
    available for diagnosis.
    """

    def __init__(self, report, message='network has violations'):
        ValidationError.__init__(
            self, '{0}\n{1}'.format(message, report.to_text()),
            field_path='network')
        self.report = report


class RepairExhausted(NetworkRejected):
    """
    The language model did not produce a valid network within the allowed
    number of rounds. ``report`` is the last validation report (or ``None`` if
    the last answer could not be parsed at all) and ``rounds`` the number of
    calls made.
    """

    def __init__(self, rounds, report=None, parse_error=None):
        self.rounds = rounds
        self.parse_error = parse_error
        message = 'no valid network after {0} rounds'.format(rounds)
        if report is not None:
            NetworkRejected.__init__(self, report, message)
        else:
            ValidationError.__init__(
                self, '{0}: {1}'.format(message, parse_error),
                field_path='network')
            self.report = None


class OffRoadError(ValidationError):
    """
    A state could not be matched to any lane::

        >>> OffRoadError('no lane within 5.0 m').exit_code
        2
    """

    def __init__(self, message):
        ValidationError.__init__(self, message, field_path='state')


class NoCandidateError(ValidationError):
    """
    No route has a non-empty admissible goal band.
    """

    def __init__(self, message='no route admits a goal candidate'):
        ValidationError.__init__(self, message, field_path='candidates')


class GoalParseError(ValidationError):
    """
    A goal-selection answer had no usable ranking::

        >>> str(GoalParseError('no RANKING line'))
        'ranking: no RANKING line'
    """

    def __init__(self, message):
        ValidationError.__init__(self, message, field_path='ranking')


class DatabaseError(ValidationError):
    """
    A vehicle database row is malformed. The line number is kept::

        >>> str(DatabaseError('length must be positive', line=3))
        'line 3: length must be positive'
    """

    def __init__(self, message, line=None):
        ValidationError.__init__(
            self, message,
            field_path='line {0}'.format(line) if line is not None else None)
        self.line = line


class TrainingDiverged(ValidationError):
    """
    The training loss stopped being finite. ``diagnostics`` holds what was
    known when it happened.
    """

    def __init__(self, diagnostics):
        ValidationError.__init__(
            self, 'non-finite loss: {0}'.format(
                ', '.join(
                    '{0}={1}'.format(k, diagnostics[k])
                    for k in sorted(diagnostics))),
            field_path='training')
        self.diagnostics = diagnostics


class BackendError(CruzamentoError):
    """
    Some model backend failed::

        >>> BackendError('timeout').exit_code
        3
    """

    def __init__(self, message=None, *args):
        CruzamentoError.__init__(self, message, BACKEND, *args)


class ConfigurationError(BackendError):
    """
    A backend cannot even be set up, for example because its credentials are
    missing::

        >>> str(ConfigurationError('CRUZAMENTO_TEXT_API_KEY is not set'))
        'CRUZAMENTO_TEXT_API_KEY is not set'
    """


class TransientBackendError(BackendError):
    """
    A failure that may go away if the request is repeated.
    """


class RetriesExhausted(BackendError):
    """
    Every retry failed. ``attempts`` tells how many calls were made.
    """

    def __init__(self, attempts, last_error=None):
        BackendError.__init__(
            self, 'gave up after {0} attempts: {1}'.format(
                attempts, last_error))
        self.attempts = attempts
        self.last_error = last_error


class ReplayMiss(BackendError):
    """
    A replay backend was asked for a query it never recorded::

        >>> str(ReplayMiss('abc'))
        'no recorded response for query abc'
    """

    def __init__(self, query_hash):
        BackendError.__init__(
            self, 'no recorded response for query {0}'.format(query_hash))
        self.query_hash = query_hash
