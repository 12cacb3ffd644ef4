#!/usr/bin/env python3
"""
Real-Algebra Toolkit - command line front end
Root counting, quadratic forms, SOS certificates and Lasserre relaxations over Q
"""

import re
import sys
import json
import logging
import argparse
import concurrent.futures
from typing import Dict, List, Optional, Sequence, Tuple

# Load environment variables from .env file
from dotenv import load_dotenv
load_dotenv()

from config import Config
from errors import InputError, NumericFailure, ToolkitError
from models import ModuleCert, SosCert
from polynomials import MPoly, format_poly, parse_poly, parse_upoly
from rational_matrix import format_rat, parse_matrix, parse_rat
from quadratic_forms import as_symmetric, diagonalize, is_psd, signature_via_descartes
from root_counting import (count_complex_distinct, count_real_roots, count_real_with_signs, decide_strict_system,
                           is_real_rooted)
from conic_pivot import conic_representation, linear_nns, newton_halved_lattice
from sos_gram import INFEASIBLE, FOUND, cassels_descent, certificate_from_json, find_gram, verify_sos
from lasserre import build_relaxation, emit_sdpa, find_module_certificate, lower_bound_bisect, verify_module_membership

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_UNKNOWN = 3

VARIABLE_PATTERN = re.compile(r'x(\d+)|([xyz])')


def setup_logging(verbose: bool = False):
    """Log to stderr (and LOG_FILE when set); stdout carries only payloads"""
    handlers = [logging.StreamHandler(sys.stderr)]
    if Config.LOG_FILE:
        handlers.append(logging.FileHandler(Config.LOG_FILE))
    logging.basicConfig(
        level=logging.INFO if verbose else getattr(logging, Config.LOG_LEVEL.upper(), logging.WARNING),
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=handlers
    )


class ToolkitArgumentParser(argparse.ArgumentParser):
    """Report usage problems as input errors instead of exiting"""

    def error(self, message):
        raise InputError(f"{message}\n{self.format_usage()}")


def _payload(value: str) -> str:
    """Inline text, '@path' for a file, '-' for stdin"""
    if value == '-':
        return sys.stdin.read().strip()
    if value.startswith('@'):
        with open(value[1:], 'r') as f:
            return f.read().strip()
    return value


def _infer_nvars(texts: Sequence[str]) -> int:
    highest = 1
    for text in texts:
        for match in VARIABLE_PATTERN.finditer(text):
            index = int(match.group(1)) if match.group(1) else 'xyz'.index(match.group(2)) + 1
            highest = max(highest, index)
    return highest


def _polys(args, *texts: str) -> Tuple[int, List[MPoly]]:
    texts = [_payload(t) for t in texts]
    nvars = args.nvars or _infer_nvars(texts)
    return nvars, [parse_poly(t, nvars) for t in texts]


def _vector_text(values) -> str:
    return ','.join(format_rat(v) for v in values)


def _matrix_text(rows) -> str:
    return ';'.join(_vector_text(row) for row in rows)


def _cert_lines(cert: SosCert) -> List[str]:
    return [f"{format_rat(w)}*({format_poly(p)})^2" for w, p in cert.terms]


# Command handlers return (exit code, human text, JSON payload)

def cmd_count_roots(args):
    f = parse_upoly(_payload(args.poly))
    real, distinct = count_real_roots(f), count_complex_distinct(f)
    return EXIT_OK, f"real={real} complex_distinct={distinct}", {'real': real, 'complex_distinct': distinct}


def cmd_count_with_signs(args):
    f = parse_upoly(_payload(args.poly))
    gs = [parse_upoly(_payload(g)) for g in args.g or []]
    count = count_real_with_signs(f, gs)
    return EXIT_OK, f"count={count}", {'count': count}


def cmd_decide_strict(args):
    gs = [parse_upoly(_payload(g)) for g in args.g or []]
    if not gs:
        raise InputError("decide-strict needs at least one -g")
    answer = decide_strict_system(gs)
    return (EXIT_OK if answer else EXIT_NEGATIVE), str(answer).lower(), {'satisfiable': answer}


def cmd_descartes(args):
    f = parse_upoly(_payload(args.poly))
    sigma, sigma_neg = f.sign_changes(), f.compose_neg().sign_changes()
    data = {'sign_changes': sigma, 'negative_sign_changes': sigma_neg, 'parity': sigma % 2,
            'real_rooted': is_real_rooted(f)}
    text = f"sign_changes={sigma} negative_sign_changes={sigma_neg} parity={sigma % 2}"
    if data['real_rooted']:
        data['positive_roots'], data['negative_roots'] = sigma, sigma_neg
        text += f" positive_roots={sigma} negative_roots={sigma_neg}"
    return EXIT_OK, text, data


def cmd_signature(args):
    M = as_symmetric(parse_matrix(_payload(args.matrix)))
    congruence = diagonalize(M)
    data = {'rank': congruence.rank, 'signature': congruence.signature,
            'signature_descartes': signature_via_descartes(M)}
    return EXIT_OK, f"rank={congruence.rank} signature={congruence.signature}", data


def cmd_diagonalize(args):
    congruence = diagonalize(as_symmetric(parse_matrix(_payload(args.matrix))))
    text = f"D={_vector_text(congruence.D)}\nP={_matrix_text(congruence.P.to_rows())}"
    return EXIT_OK, text, congruence.to_dict()


def cmd_psd_check(args):
    answer = is_psd(as_symmetric(parse_matrix(_payload(args.matrix))))
    return (EXIT_OK if answer else EXIT_NEGATIVE), 'psd' if answer else 'not-psd', {'psd': answer}


def cmd_conic(args):
    E = parse_matrix(_payload(args.generators)).to_rows()
    x = [parse_rat(v) for v in _payload(args.target).split(',')]
    result = conic_representation(E, x)
    if result.is_member:
        text = f"A basis={','.join(map(str, result.basis))} coefficients={_vector_text(result.coefficients)}"
        return EXIT_OK, text, result.to_dict()
    text = f"B functional={_vector_text(result.functional)} kernel={','.join(map(str, result.kernel))}"
    return EXIT_NEGATIVE, text, result.to_dict()


def cmd_lin_nns(args):
    _, polys = _polys(args, args.poly, *(args.l or []))
    result = linear_nns(polys[0], polys[1:])
    if result.kind == 'witness':
        return EXIT_NEGATIVE, f"witness x={_vector_text(result.witness)}", result.to_dict()
    return EXIT_OK, f"{result.kind} coefficients={_vector_text(result.coefficients)}", result.to_dict()


def cmd_newton(args):
    _, (f,) = _polys(args, args.poly)
    points = newton_halved_lattice(f)
    text = ' '.join('(' + ','.join(map(str, p)) + ')' for p in points)
    return EXIT_OK, text, {'points': [list(p) for p in points]}


def cmd_sos_find(args):
    _, (f,) = _polys(args, args.poly)
    result = find_gram(f)
    if result.status == FOUND:
        return EXIT_OK, '\n'.join(['found'] + _cert_lines(result.certificate)), result.to_dict()
    code = EXIT_NEGATIVE if result.status == INFEASIBLE else EXIT_UNKNOWN
    return code, result.status, result.to_dict()


def _certificate_nvars(data: Dict, texts: List[str]) -> int:
    if data.get('monomials'):
        return len(data['monomials'][0])
    texts = texts + [data.get('target', '')] + [t.get('poly', '') for t in data.get('terms', [])]
    return _infer_nvars(texts)


def cmd_sos_check(args):
    text = _payload(args.cert)
    poly_text = _payload(args.poly) if args.poly else None
    nvars = args.nvars or _certificate_nvars(json.loads(text), [poly_text] if poly_text else [])
    target, cert = certificate_from_json(text, nvars)
    if poly_text:
        target = parse_poly(poly_text, nvars)
    if target is None:
        raise InputError("No target polynomial: pass --poly or include 'target' in the certificate")
    check = verify_sos(target, cert)
    return (EXIT_OK if check else EXIT_NEGATIVE), 'valid' if check else f"invalid {check.reason}", check.to_dict()


def cmd_cassels(args):
    weights = [parse_rat(w) for w in _payload(args.weights).split(',')]
    fs = [parse_upoly(_payload(f)) for f in args.f or []]
    g = parse_upoly(_payload(args.g))
    cert = cassels_descent(weights, fs, g)
    return EXIT_OK, '\n'.join(_cert_lines(cert)), cert.to_dict()


def _constraints(args, target_text: Optional[str]) -> Tuple[int, List[MPoly], Optional[MPoly]]:
    """Side conditions plus an optional target, parsed in one shared variable count"""
    texts = [_payload(g) for g in args.g or []]
    target_text = _payload(target_text) if target_text else None
    nvars = args.nvars or _infer_nvars(texts + ([target_text] if target_text else []))
    target = parse_poly(target_text, nvars) if target_text else None
    return nvars, [parse_poly(t, nvars) for t in texts], target


def cmd_lasserre_build(args):
    nvars, gs, objective = _constraints(args, args.objective)
    rel = build_relaxation(gs, args.degree, nvars)
    sdpa = emit_sdpa(rel, objective if objective is not None else MPoly.variable(1, nvars))
    if args.output:
        with open(args.output, 'w') as f:
            f.write(sdpa)
        logger.info(f"Wrote {args.output}")
        text = f"variables={rel.num_variables} blocks={' '.join(map(str, rel.block_sizes))}"
    else:
        text = sdpa.rstrip('\n')
    return EXIT_OK, text, rel.to_dict()


def _module_cert_from_json(text: str, nvars: int) -> ModuleCert:
    data = json.loads(text)
    sigmas = []
    for terms in data['sigmas']:
        sigmas.append(SosCert(tuple((parse_rat(t['weight']), parse_poly(t['poly'], nvars)) for t in terms)))
    return ModuleCert(tuple(sigmas))


def cmd_lasserre_check(args):
    nvars, gs, f = _constraints(args, args.poly)
    if args.cert:
        check = verify_module_membership(f, gs, args.degree, _module_cert_from_json(_payload(args.cert), nvars))
        return (EXIT_OK if check else EXIT_NEGATIVE), 'valid' if check else f"invalid {check.reason}", check.to_dict()
    status, cert = find_module_certificate(f, gs, args.degree)
    if status == FOUND:
        return EXIT_OK, 'found', {'status': status, **cert.to_dict()}
    code = EXIT_NEGATIVE if status == INFEASIBLE else EXIT_UNKNOWN
    return code, status, {'status': status}


def cmd_lasserre_bound(args):
    _, gs, f = _constraints(args, args.poly)
    bracket = None
    if args.lo is not None or args.hi is not None:
        if args.lo is None or args.hi is None:
            raise InputError("--lo and --hi go together")
        bracket = (parse_rat(args.lo), parse_rat(args.hi))
    result = lower_bound_bisect(f, gs, args.degree, args.iterations, bracket)
    text = f"lo={format_rat(result.lo)} hi={format_rat(result.hi)} certified={str(result.certified).lower()}"
    return (EXIT_OK if result.certified else EXIT_UNKNOWN), text, result.to_dict()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--json', action='store_true', default=argparse.SUPPRESS, help='stable JSON output')
    common.add_argument('-v', '--verbose', action='store_true', default=argparse.SUPPRESS, help='log at INFO')
    common.add_argument('-n', '--nvars', type=int, default=argparse.SUPPRESS, help='number of variables')

    parser = ToolkitArgumentParser(prog='main.py', description='Exact real-algebra toolkit over Q')
    parser.add_argument('--json', action='store_true', help='stable JSON output')
    parser.add_argument('-v', '--verbose', action='store_true', help='log at INFO')
    parser.add_argument('-n', '--nvars', type=int, default=None, help='number of variables')
    parser.add_argument('--batch', metavar='FILE', help='run one invocation per line concurrently')
    commands = parser.add_subparsers(dest='command', parser_class=ToolkitArgumentParser)

    def command(name, handler, *specs, parent=commands):
        sub = parent.add_parser(name, parents=[common])
        for flags, options in specs:
            sub.add_argument(*flags, **options)
        sub.set_defaults(handler=handler)
        return sub

    poly = (('--poly', '-p'), {'required': True, 'help': "polynomial text, '@file' or '-'"})
    optional_poly = (('--poly', '-p'), {'help': "polynomial text, '@file' or '-'"})
    conditions = (('-g',), {'action': 'append', 'help': 'side condition / constraint polynomial'})
    matrix = (('--matrix', '-m'), {'required': True, 'help': "rows 'a,b;c,d'"})
    degree = (('-d', '--degree'), {'type': int, 'required': True})

    command('count-roots', cmd_count_roots, poly)
    command('count-with-signs', cmd_count_with_signs, poly, conditions)
    command('decide-strict', cmd_decide_strict, conditions)
    command('descartes', cmd_descartes, poly)
    command('signature', cmd_signature, matrix)
    command('diagonalize', cmd_diagonalize, matrix)
    command('psd-check', cmd_psd_check, matrix)
    command('conic', cmd_conic,
            (('--generators', '-E'), {'required': True, 'help': "generators as rows 'a,b;c,d'"}),
            (('--target', '-x'), {'required': True, 'help': "target vector 'a,b'"}))
    command('lin-nns', cmd_lin_nns, poly, (('-l',), {'action': 'append', 'help': 'affine constraint l >= 0'}))
    command('newton', cmd_newton, poly)
    command('cassels', cmd_cassels,
            (('--weights', '-w'), {'required': True, 'help': "nonnegative weights 'a,b'"}),
            (('-f',), {'action': 'append', 'required': True, 'help': 'numerator polynomial'}),
            (('-g',), {'required': True, 'help': 'denominator polynomial'}))

    sos = commands.add_parser('sos', parents=[common]).add_subparsers(dest='sos_command', parser_class=ToolkitArgumentParser)
    command('find', cmd_sos_find, poly, parent=sos)
    command('check', cmd_sos_check, optional_poly,
            (('--cert', '-c'), {'required': True, 'help': "certificate JSON, '@file' or '-'"}), parent=sos)

    lasserre = commands.add_parser('lasserre', parents=[common]).add_subparsers(dest='lasserre_command', parser_class=ToolkitArgumentParser)
    command('build', cmd_lasserre_build, degree, conditions,
            (('--objective',), {'help': 'objective polynomial, default x1'}),
            (('-o', '--output'), {'help': 'SDPA output file'}), parent=lasserre)
    command('check', cmd_lasserre_check, degree, conditions, poly,
            (('--cert', '-c'), {'help': 'module certificate JSON; searched for when absent'}), parent=lasserre)
    command('bound', cmd_lasserre_bound, degree, conditions, poly,
            (('--iterations', '-k'), {'type': int, 'default': 12}),
            (('--lo',), {'help': 'explicit lower end of the bracket'}),
            (('--hi',), {'help': 'explicit upper end of the bracket'}), parent=lasserre)
    return parser


def _render(args, code: int, text: str, data: Dict) -> str:
    if getattr(args, 'json', False):
        return json.dumps({'exit_code': code, **data}, sort_keys=True)
    return text


def dispatch(argv: Sequence[str]) -> Tuple[int, str]:
    """Parse and run one invocation without touching logging configuration"""
    json_output = '--json' in argv
    try:
        args = build_parser().parse_args(list(argv))
        if not hasattr(args, 'handler'):
            raise InputError(f"Missing subcommand\n{build_parser().format_usage()}")
        code, text, data = args.handler(args)
        return code, _render(args, code, text, data)
    except (ToolkitError, ValueError, OSError, json.JSONDecodeError, KeyError) as e:
        logger.debug(f"Input error: {e}")
        message = str(e)
        return EXIT_INPUT, json.dumps({'exit_code': EXIT_INPUT, 'error': message}) if json_output else f"error: {message}"
    except NumericFailure as e:
        logger.warning(f"Numeric failure: {e}")
        return EXIT_UNKNOWN, json.dumps({'exit_code': EXIT_UNKNOWN, 'error': str(e)}) if json_output else f"unknown: {e}"


def _run_instance(index: int, argv: List[str]) -> Dict:
    try:
        code, output = dispatch(argv)
        return {'index': index, 'success': code in (EXIT_OK, EXIT_NEGATIVE), 'exit_code': code,
                'output': output, 'error': None}
    except Exception as e:
        return {'index': index, 'success': False, 'exit_code': EXIT_INPUT, 'output': '', 'error': str(e)}


def run_batch(batch_file: str, json_output: bool) -> Tuple[int, str]:
    """Run every line of the batch file concurrently, report in input order"""
    instances = Config.load_batch(batch_file)
    max_workers = max(1, min(Config.BATCH_MAX_WORKERS, len(instances)))
    logger.info(f"Processing {len(instances)} instances with {max_workers} workers")
    results: Dict[int, Dict] = {}

    with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as executor:
        future_to_index = {
            executor.submit(_run_instance, index, (['--json'] if json_output else []) + argv): index
            for index, argv in enumerate(instances)
        }
        for future in concurrent.futures.as_completed(future_to_index):
            index = future_to_index[future]
            try:
                result = future.result()
            except Exception as e:
                result = {'index': index, 'success': False, 'exit_code': EXIT_INPUT, 'output': '', 'error': str(e)}
            if result['success']:
                logger.info(f"✓ instance {index}: exit {result['exit_code']}")
            else:
                logger.error(f"✗ instance {index}: {result['error'] or result['output']}")
            results[index] = result

    ordered = [results[i] for i in range(len(instances))]
    code = max((r['exit_code'] for r in ordered), default=EXIT_OK)
    if json_output:
        return code, json.dumps(ordered, sort_keys=True)
    return code, '\n'.join(f"[{r['index']}] exit={r['exit_code']} {r['output'] or r['error']}" for r in ordered)


def run(argv: Sequence[str]) -> Tuple[int, str]:
    """Entry point for one CLI invocation: returns (exit code, stdout text)"""
    argv = list(argv)
    try:
        args, _ = build_parser().parse_known_args(argv)
    except InputError as e:
        return EXIT_INPUT, f"error: {e}"
    setup_logging(getattr(args, 'verbose', False) or '-v' in argv or '--verbose' in argv)
    if args.batch:
        try:
            return run_batch(args.batch, args.json)
        except OSError as e:
            return EXIT_INPUT, f"error: {e}"
    return dispatch(argv)


def main():
    code, output = run(sys.argv[1:])
    if output:
        print(output)
    sys.exit(code)


if __name__ == '__main__':
    main()
