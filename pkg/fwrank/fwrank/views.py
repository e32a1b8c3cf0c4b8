import logging

from django.conf import settings
from django.views.decorators.csrf import csrf_exempt
from rest_framework import status
from rest_framework.decorators import api_view
from rest_framework.response import Response

from .exceptions import DimensionMismatch, FactorWidthError, ParseError
from .matcore import SymMatrix
from .services import fw_service
from .specgraph import SupportGraph

logger = logging.getLogger(__name__)


def _matrix(data, key, cfg, required=True):
    value = data.get(key)
    if value is None:
        if required:
            raise ParseError(f"'{key}' is required")
        return None
    try:
        return SymMatrix(value, tol=cfg)
    except DimensionMismatch as e:
        raise ParseError(f"'{key}' must be a square list of numbers: {e}") from e
    except (TypeError, ValueError) as e:
        if isinstance(e, FactorWidthError):
            raise
        raise ParseError(f"'{key}' must be a square list of numbers") from e


def _int(data, key, required=False):
    value = data.get(key)
    if value is None:
        if required:
            raise ParseError(f"'{key}' is required")
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"'{key}' must be an integer")
    return value


def _float(data, key, required=False):
    value = data.get(key)
    if value is None:
        if required:
            raise ParseError(f"'{key}' is required")
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"'{key}' must be a number")
    return float(value)


def _tolerance(data):
    return fw_service.tolerance(
        tol_psd=_float(data, 'tol_psd'),
        tol_recon=_float(data, 'tol_recon'),
        tol_zero=_float(data, 'tol_zero'),
        max_iter=_int(data, 'max_iter'),
    )


def _handle(compute):
    try:
        return Response(compute())
    except FactorWidthError as e:
        return Response(e.to_dict(), status=e.http_status)
    except Exception as e:
        logger.exception("unexpected failure")
        return Response({'error': str(e)}, status=status.HTTP_500_INTERNAL_SERVER_ERROR)


# ==================== MATRIX ENDPOINTS ====================

@csrf_exempt
@api_view(['POST'])
def check(request):
    """Factor width of a matrix, with a membership verdict when k is given"""
    def compute():
        cfg = _tolerance(request.data)
        return fw_service.check(_matrix(request.data, 'matrix', cfg), _int(request.data, 'k'), cfg)
    return _handle(compute)


@csrf_exempt
@api_view(['POST'])
def decompose(request):
    """Factor-width-k decomposition"""
    def compute():
        cfg = _tolerance(request.data)
        return fw_service.decompose(_matrix(request.data, 'matrix', cfg), _int(request.data, 'k'), cfg)
    return _handle(compute)


@csrf_exempt
@api_view(['POST'])
def bounds(request):
    def compute():
        cfg = _tolerance(request.data)
        A = _matrix(request.data, 'matrix', cfg)
        return fw_service.bounds(A, _int(request.data, 'k'), cfg, _int(request.data, 'budget'))
    return _handle(compute)


@csrf_exempt
@api_view(['POST'])
def hadamard(request):
    """Hadamard product (with 'other'), power (with 's') or minimal power search"""
    def compute():
        data = request.data
        cfg = _tolerance(data)
        return fw_service.hadamard(
            _matrix(data, 'matrix', cfg),
            _matrix(data, 'other', cfg, required=False),
            _float(data, 's'),
            _int(data, 'k'),
            cfg,
            bool(data.get('min_power', False)),
            _int(data, 'm_cap'),
        )
    return _handle(compute)


# ==================== COMBINATORIAL ENDPOINTS ====================

@csrf_exempt
@api_view(['POST'])
def cover(request):
    def compute():
        data = request.data
        return fw_service.cover(_int(data, 'n', True), _int(data, 'k', True), _int(data, 'budget'))
    return _handle(compute)


@csrf_exempt
@api_view(['POST'])
def cliquecover(request):
    def compute():
        data = request.data
        edges = data.get('edges')
        if not isinstance(edges, list) or not all(isinstance(e, list) and len(e) == 2 for e in edges):
            raise ParseError("'edges' must be a list of [i, j] pairs")
        G = SupportGraph.from_edges(_int(data, 'n', True), edges, one_based=True)
        return fw_service.cliquecover(G, _int(data, 'k', True), _int(data, 'budget'))
    return _handle(compute)


@csrf_exempt
@api_view(['POST'])
def conjecture(request):
    def compute():
        data = request.data
        report, _ = fw_service.conjecture(
            _int(data, 'n', True),
            _int(data, 'k', True),
            _float(data, 's', True),
            _int(data, 'trials', True),
            _int(data, 'seed'),
            _tolerance(data),
        )
        return report
    return _handle(compute)


# ==================== STATUS & HEALTH ENDPOINTS ====================

@api_view(['GET'])
def health_check(request):
    """Health check endpoint"""
    try:
        return Response({
            'status': 'healthy',
            'tolerance': fw_service.tolerance().to_dict(),
            'config': {key: value for key, value in sorted(getattr(settings, 'FACTOR_WIDTH', {}).items())},
        })
    except Exception as e:
        return Response({
            'status': 'unhealthy',
            'error': str(e)
        }, status=status.HTTP_500_INTERNAL_SERVER_ERROR)
