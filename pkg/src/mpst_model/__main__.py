# Copyright 2024 mpst-model contributors
#
# Use of this source code is governed by an MIT license:
# see the LICENSE file at the root of the repository

import argparse
import json
import logging
import sys
from typing import NamedTuple, Optional

from mpst_model import __version__
from mpst_model.corpus import CorpusParams, gen_corpus, write_corpus
from mpst_model.equirec.arena import TreeHandle, intern, participants
from mpst_model.equirec.dot import to_dot, tree_graph
from mpst_model.errors import (DslSyntaxError, GenerationExhausted, KindMismatch, PreconditionViolation,
                               StateBudgetExceeded, Truncated)
from mpst_model.fixtures import golden_checks
from mpst_model.limits import DEFAULT_MAX_STATES, DEFAULT_SCHEDULE_STEPS, DEFAULT_SESSION_DEPTH
from mpst_model.lts.environment import env_state_graph
from mpst_model.model import POLICIES, SessionModel, TraceOutcome, describe_step
from mpst_model.projection import TypeEnv, check_association, project
from mpst_model.properties.liveness import env_live
from mpst_model.properties.safety import safe
from mpst_model.properties.sessions import SessionGraph, SessionStatus, deadlock_status, session_live_bounded
from mpst_model.properties.verdict import Verdict
from mpst_model.report import Report, describe, state_graph_dot
from mpst_model.subtyping import subtype_witness
from mpst_model.syntax.parser import parse_file
from mpst_model.syntax.render import render
from mpst_model.syntax.terms import participant
from mpst_model.typecheck import check_session

EXIT_HOLDS = 0
EXIT_REFUTED = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3

logger = logging.getLogger('mpst_model')


class Outcome(NamedTuple):
    report: Report
    text: Optional[str] = None   # replaces the report text when not emitting JSON
    code: Optional[int] = None   # overrides the exit code derived from the report


def load_env(path: str) -> TypeEnv:
    return TypeEnv.from_form(parse_file('env', path))


def load_global(path: str) -> TreeHandle:
    return intern(parse_file('global', path))


def load_local(path: str) -> TreeHandle:
    return intern(parse_file('local', path))


def cmd_project(args) -> Outcome:
    g = load_global(args.file)
    report = Report('project', [args.file])
    roles = [participant(args.role)] if args.role else sorted(participants(g))
    shown = None
    for r in roles:
        t = project(g, r)
        if t is None:
            report.add(str(r), holds=False, reason=f'{r} has no projection')
            continue
        shown = shown or t
        report.add(str(r), output=render(t) if args.role else f'{r} : {render(t)}')
    text = to_dot(tree_graph(shown)) if args.emit == 'dot' and shown is not None else None
    return Outcome(report, text)


def cmd_subtype(args) -> Outcome:
    a, b = load_local(args.sub), load_local(args.sup)
    report = Report('subtype', [args.sub, args.sup])
    witness = subtype_witness(a, b)
    if witness is None:
        report.add_verdict('subtype', Verdict(True))
    else:
        report.add_verdict('subtype', Verdict(False, counterexample=list(witness),
                                              reason='no subtyping rule applies to this pair'))
    return Outcome(report)


def cmd_assoc(args) -> Outcome:
    env, g = load_env(args.env), load_global(args.global_type)
    report = Report('assoc', [args.env, args.global_type])
    for entry in check_association(env, g, not args.no_balance_check).entries:
        fields = {'holds': entry.holds}
        if entry.projection is not None:
            fields['projection'] = entry.projection
        if not entry.holds:
            fields['reason'] = entry.reason
            if entry.witness is not None:
                fields['counterexample'] = list(entry.witness)
        report.add(str(entry.participant), **fields)
    return Outcome(report)


def cmd_safety(args) -> Outcome:
    env = load_env(args.env)
    report = Report('safety', [args.env])
    report.add_verdict('safety', safe(env, args.max_states))
    text = state_graph_dot(env_state_graph(env, args.max_states)) if args.emit == 'dot' else None
    return Outcome(report, text)


def cmd_live(args) -> Outcome:
    env = load_env(args.env)
    report = Report('live', [args.env])
    verdict = env_live(env, args.max_states)
    report.add_verdict('liveness', verdict)
    text = None
    if args.emit == 'dot':
        text = state_graph_dot(env_state_graph(env, args.max_states), verdict.counterexample)
    return Outcome(report, text)


def cmd_typecheck(args) -> Outcome:
    m = parse_file('session', args.session)
    env, g = load_env(args.env), load_global(args.global_type)
    report = Report('typecheck', [args.session, args.env, args.global_type])
    report.add_verdict('typing', check_session(m, env, g, not args.no_balance_check))
    return Outcome(report)


def cmd_simulate(args) -> Outcome:
    m = parse_file('session', args.session)
    report = Report('simulate', [args.session])
    lines = []
    if args.policy == 'exhaustive':
        explored = SessionGraph(m, args.depth)
        for source, target, label in explored.graph.edges(data='label'):
            step = {'state': describe(source), 'label': str(label), 'next': describe(target)}
            lines.append(step)
            report.add('edge', **step)
        code = EXIT_BUDGET if explored.truncated else EXIT_HOLDS
    else:
        model = SessionModel(m, policy=args.policy, max_steps=args.steps, seed=args.seed)
        trace = model.run()
        for step in trace.steps:
            lines.append(describe_step(step))
            report.add('step', **describe_step(step))
        report.add('outcome', holds=trace.outcome is not TraceOutcome.DEADLOCKED, outcome=trace.outcome.value)
        code = EXIT_BUDGET if trace.outcome is TraceOutcome.TRUNCATED else None
    text = '\n'.join(json.dumps(line, sort_keys=True) for line in lines)
    return Outcome(report, text, code)


def cmd_dlock(args) -> Outcome:
    m = parse_file('session', args.session)
    report = Report('dlock', [args.session])
    status = deadlock_status(m)
    report.add('deadlock', holds=status.status is not SessionStatus.DEADLOCKED, status=status.status.value,
               terminated_reachable=status.terminated_reachable)
    return Outcome(report)


def cmd_slive(args) -> Outcome:
    m = parse_file('session', args.session)
    report = Report('slive', [args.session])
    report.add_verdict('session liveness', session_live_bounded(m, args.depth))
    return Outcome(report)


def cmd_gen(args) -> Outcome:
    params = CorpusParams(args.max_participants, args.max_labels, args.max_depth, not args.allow_unbalanced)
    items = gen_corpus(args.seed if args.seed is not None else 0, args.count, params, max_states=args.max_states)
    summary = write_corpus(items, args.directory)
    report = Report('gen')
    report.add('corpus', output=summary.to_string(index=False), directory=args.directory, count=len(items))
    return Outcome(report, summary.to_string(index=False))


def cmd_selftest(args) -> Outcome:
    report = Report('selftest')
    for check in golden_checks():
        report.add(check.name, holds=check.passed)
    return Outcome(report)


COMMANDS = {
    'project': cmd_project,
    'subtype': cmd_subtype,
    'assoc': cmd_assoc,
    'safety': cmd_safety,
    'live': cmd_live,
    'typecheck': cmd_typecheck,
    'simulate': cmd_simulate,
    'dlock': cmd_dlock,
    'slive': cmd_slive,
    'gen': cmd_gen,
    'selftest': cmd_selftest,
}


def get_parser():
    """
    Creates a new argument parser.
    """
    parser = argparse.ArgumentParser('mpst', description='Check multiparty session protocols.')
    version = '%(prog)s ' + __version__
    parser.add_argument('--version', '-v', action='version', version=version)
    parser.add_argument('--verbose', '-V', action='store_true', help='log progress at debug level')
    parser.add_argument('--json', action='store_true', help='print the report as JSON')
    parser.add_argument('--emit', choices=['dot'], help='print a graph instead of the report')
    parser.add_argument('--max-states', type=int, default=DEFAULT_MAX_STATES, help='environment state budget')
    parser.add_argument('--depth', type=int, default=DEFAULT_SESSION_DEPTH, help='session exploration depth')
    parser.add_argument('--seed', type=int, help='random seed')
    parser.add_argument('--no-balance-check', action='store_true', help='accept unbalanced global types')
    commands = parser.add_subparsers(dest='command', required=True)

    project_cmd = commands.add_parser('project', help='project a global type')
    project_cmd.add_argument('file')
    project_cmd.add_argument('--role', help='participant to project onto (default: all)')

    subtype_cmd = commands.add_parser('subtype', help='decide subtyping of two local types')
    subtype_cmd.add_argument('sub')
    subtype_cmd.add_argument('sup')

    assoc_cmd = commands.add_parser('assoc', help='check association of an environment with a global type')
    assoc_cmd.add_argument('env')
    assoc_cmd.add_argument('global_type', metavar='global')

    for name, description in (('safety', 'check environment safety'), ('live', 'check environment liveness')):
        commands.add_parser(name, help=description).add_argument('env')

    typecheck_cmd = commands.add_parser('typecheck', help='type a session')
    typecheck_cmd.add_argument('session')
    typecheck_cmd.add_argument('--env', required=True)
    typecheck_cmd.add_argument('--global', dest='global_type', required=True)

    simulate_cmd = commands.add_parser('simulate', help='run a session')
    simulate_cmd.add_argument('session')
    simulate_cmd.add_argument('--policy', choices=POLICIES + ('exhaustive',), default='fair')
    simulate_cmd.add_argument('--steps', type=int, default=DEFAULT_SCHEDULE_STEPS)

    for name, description in (('dlock', 'classify a session as terminated, progressing or deadlocked'),
                              ('slive', 'check session liveness up to --depth')):
        commands.add_parser(name, help=description).add_argument('session')

    gen_cmd = commands.add_parser('gen', help='generate a protocol corpus')
    gen_cmd.add_argument('directory')
    gen_cmd.add_argument('--count', type=int, default=10)
    gen_cmd.add_argument('--max-participants', type=int, default=3)
    gen_cmd.add_argument('--max-labels', type=int, default=2)
    gen_cmd.add_argument('--max-depth', type=int, default=3)
    gen_cmd.add_argument('--allow-unbalanced', action='store_true')

    commands.add_parser('selftest', help='reproduce the worked examples')
    return parser


def run(args=None) -> int:
    """Run one command.

    Args:
        args (list, optional): Command line arguments; None uses sys.argv.

    Returns:
        int: 0 when the property holds, 1 when it is refuted, 2 on input errors, 3 when a budget
        ran out.
    """
    parser = get_parser()
    try:
        args = parser.parse_args(args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INPUT
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        outcome = COMMANDS[args.command](args)
    except (DslSyntaxError, PreconditionViolation, KindMismatch, OSError, ValueError) as e:
        print(f'mpst: error: {e}', file=sys.stderr)
        return EXIT_INPUT
    except (StateBudgetExceeded, Truncated, GenerationExhausted) as e:
        print(f'mpst: budget exceeded: {e}', file=sys.stderr)
        return EXIT_BUDGET
    if args.json:
        print(outcome.report.to_json())
    elif outcome.text is not None:
        print(outcome.text)
    else:
        print(outcome.report.to_text())
    logger.info('%s finished', args.command)
    if outcome.code is not None:
        return outcome.code
    return EXIT_HOLDS if outcome.report.holds else EXIT_REFUTED


def main(args=None):
    """
    Main entry point for the mpst command.

    Args:
        args : list
            A list of arguments as if they were input in the command line. Leave it
            None to use sys.argv.
    """
    raise SystemExit(run(args))


if __name__ == '__main__':
    main()
