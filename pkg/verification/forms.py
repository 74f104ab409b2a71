from django import forms
from django.core.exceptions import ValidationError

from .construction import ConstructionParams
from .exceptions import ParameterError
from .knx import OVERRIDABLE


def _vertex_list(value, name):
    """Parse '0,1,2' into a sorted list of vertex ids"""
    if not value:
        return None
    try:
        vertices = sorted({int(part) for part in value.split(',') if part.strip()})
    except ValueError:
        raise ValidationError(f'{name} must be a comma-separated list of vertex ids.')
    if any(v < 0 for v in vertices):
        raise ValidationError(f'{name} must not contain negative vertex ids.')
    return vertices


class ConstructionParamsForm(forms.Form):
    """Parameters h, d, m of G_{h,d,m}; optional for commands that take a --host instead"""
    h = forms.IntegerField(required=False, help_text='Height of the binary tree.')
    d = forms.IntegerField(required=False, help_text='Spine and segment length parameter.')
    m = forms.IntegerField(required=False, help_text='Number of nested levels.')

    def clean(self):
        """Validate the three parameters together when all are given"""
        cleaned = super().clean()
        values = [cleaned.get(key) for key in ('h', 'd', 'm')]
        if all(v is not None for v in values):
            try:
                ConstructionParams(*values).validate()
            except ParameterError as exc:
                raise ValidationError(str(exc))
        elif any(v is not None for v in values):
            raise ValidationError('--h, --d and --m must be given together.')
        return cleaned


class SearchOptionsForm(ConstructionParamsForm):
    """Options shared by verify and search"""
    K = forms.IntegerField(required=False, min_value=0, help_text='Fatness / distance threshold.')
    l = forms.IntegerField(required=False, min_value=0, help_text='Radius or path count.')
    n = forms.IntegerField(required=False, min_value=1)
    level = forms.IntegerField(required=False, min_value=0)
    budget = forms.IntegerField(required=False, min_value=0, help_text='Search node limit.')
    samples = forms.IntegerField(required=False, min_value=1)
    seed = forms.IntegerField(required=False, min_value=0)
    jobs = forms.IntegerField(required=False, min_value=1)
    recursive = forms.BooleanField(required=False)
    avoid_root = forms.BooleanField(required=False)
    host = forms.CharField(required=False)
    pattern = forms.CharField(required=False)
    a = forms.CharField(required=False)
    b = forms.CharField(required=False)
    w = forms.CharField(required=False)

    def clean_a(self):
        return _vertex_list(self.cleaned_data.get('a'), '--a')

    def clean_b(self):
        return _vertex_list(self.cleaned_data.get('b'), '--b')

    def clean_w(self):
        return _vertex_list(self.cleaned_data.get('w'), '--w')

    def clean_host(self):
        return self.cleaned_data.get('host') or None

    def clean_pattern(self):
        return self.cleaned_data.get('pattern') or None


class QIForm(SearchOptionsForm):
    """Quasi-isometry constants and the map to check"""
    M = forms.IntegerField(required=False, min_value=1, help_text='Multiplicative constant.')
    A = forms.IntegerField(required=False, min_value=0, help_text='Additive constant.')
    map = forms.ChoiceField(required=False, choices=[('identity', 'identity'), ('subdivision', 'subdivision')])
    map_file = forms.CharField(required=False, help_text='JSON file with the assignment of the map.')
    target = forms.CharField(required=False, help_text='Target graph of --map-file; defaults to the host.')

    def clean_map(self):
        return self.cleaned_data.get('map') or 'identity'

    def clean(self):
        """A map file replaces --map, and --target only makes sense with one"""
        cleaned = super().clean()
        if cleaned.get('target') and not cleaned.get('map_file'):
            raise ValidationError('--target needs --map-file.')
        if cleaned.get('map_file') and self.data.get('map'):
            raise ValidationError('--map and --map-file cannot be combined.')
        return cleaned


class ExtractionForm(QIForm):
    """Options of extract kn"""
    override = forms.Field(required=False, help_text='key=value pairs replacing derived constants.')
    assume_qi = forms.BooleanField(required=False)

    def clean_override(self):
        """Turn ['q=1', 'r=1'] into {'q': 1, 'r': 1}"""
        pairs = self.cleaned_data.get('override') or []
        overrides = {}
        for pair in pairs:
            key, sep, value = str(pair).partition('=')
            if not sep or key not in OVERRIDABLE:
                raise ValidationError(
                    f'Bad override {pair!r}; use key=value with key in {", ".join(OVERRIDABLE)}.')
            try:
                overrides[key] = int(value)
            except ValueError:
                raise ValidationError(f'Override {key} needs an integer value.')
            if overrides[key] < 0:
                raise ValidationError(f'Override {key} must be nonnegative.')
        return overrides
