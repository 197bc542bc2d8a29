"""JSON schemas for run configs and level-set descriptions."""

WAVELET_PATTERN = r'^[246]\.[02]$'

POINT = {
    'type': 'array',
    'items': {'type': 'number'},
    'minItems': 2,
    'maxItems': 2,
}

GEOMETRY_SCHEMA = {
    'oneOf': [
        {
            'type': 'object',
            'properties': {
                'kind': {'const': 'star'},
                'center': POINT,
                'r0': {'type': 'number', 'exclusiveMinimum': 0},
                'amp': {'type': 'number', 'minimum': 0},
                'lobes': {'type': 'integer', 'minimum': 0},
            },
            'required': ['kind'],
            'additionalProperties': False,
        },
        {
            'type': 'object',
            'properties': {
                'kind': {'const': 'circle'},
                'center': POINT,
                'r': {'type': 'number', 'exclusiveMinimum': 0},
            },
            'required': ['kind'],
            'additionalProperties': False,
        },
        {
            'type': 'object',
            'properties': {
                'kind': {'const': 'discs'},
                'centers': {'type': 'array', 'items': POINT, 'minItems': 1},
                'r': {'type': 'number', 'exclusiveMinimum': 0},
            },
            'required': ['kind'],
            'additionalProperties': False,
        },
        {
            'type': 'object',
            'properties': {'kind': {'const': 'none'}},
            'required': ['kind'],
            'additionalProperties': False,
        },
    ],
}

POSITIVE = {'type': 'number', 'exclusiveMinimum': 0}
LEVEL = {'type': 'integer', 'minimum': 2, 'maximum': 16}

RUN_CONFIG_SCHEMA = {
    '$schema': 'https://json-schema.org/draft/2020-12/schema',
    'title': 'waveletgrid run config',
    'type': 'object',
    'properties': {
        'geometry': GEOMETRY_SCHEMA,
        'wavelet': {'type': 'string', 'pattern': WAVELET_PATTERN},
        'field': {
            'type': 'object',
            'properties': {
                'name': {'enum': ['sine', 'random', 'polynomial', 'constant']},
                'seed': {'type': 'integer'},
                'degree': {'type': 'integer', 'minimum': 0},
                'scale': {'type': 'number'},
            },
            'additionalProperties': False,
        },
        'compress': {
            'type': 'object',
            'properties': {
                'level': LEVEL,
                'levels': {'type': 'integer', 'minimum': 1},
                'eps': {'type': 'array', 'items': {'type': 'number', 'minimum': 0}},
                'sweep': {
                    'type': 'object',
                    'properties': {
                        'start': POSITIVE,
                        'stop': POSITIVE,
                        'count': {'type': 'integer', 'minimum': 1},
                    },
                    'required': ['start', 'stop', 'count'],
                    'additionalProperties': False,
                },
            },
            'additionalProperties': False,
        },
        'adaptation': {
            'type': 'object',
            'properties': {
                'eps_r': POSITIVE,
                'eps_ratio': POSITIVE,
                'k': {'type': 'integer', 'minimum': 0},
                'cadence': {'type': 'integer', 'minimum': 1},
                'min_level': LEVEL,
                'max_level': LEVEL,
            },
            'additionalProperties': False,
        },
        'solver': {
            'type': 'object',
            'properties': {
                'level': LEVEL,
                'tfinal': POSITIVE,
                'fourier': POSITIVE,
                'ref_level': LEVEL,
            },
            'additionalProperties': False,
        },
        'stencil': {
            'type': 'object',
            'properties': {
                'rn': POSITIVE,
                'rt': POSITIVE,
            },
            'additionalProperties': False,
        },
        'output': {
            'type': 'object',
            'properties': {
                'csv': {'type': 'string'},
                'plot': {'type': 'string'},
                'field': {'type': 'string'},
                'prefix': {'type': 'string'},
            },
            'additionalProperties': False,
        },
        'threads': {'type': 'integer', 'minimum': 1},
    },
    'additionalProperties': False,
}
