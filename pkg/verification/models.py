from django.db import models

from .certificates import Certificate, Mode, Verdict


class CertificateRecord(models.Model):
    """Ledger entry for a certificate emitted with --record"""
    claim = models.CharField(max_length=64, db_index=True)
    verdict = models.CharField(max_length=32, choices=Verdict.choices)
    mode = models.CharField(max_length=32, choices=Mode.choices)
    params = models.JSONField(default=dict)
    payload = models.JSONField(help_text='The full certificate as emitted.')
    digest = models.CharField(max_length=64, help_text='sha256 of the canonical certificate JSON.')
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at', '-id']

    def __str__(self):
        return f'{self.claim} {self.verdict} {self.digest[:12]}'

    @classmethod
    def from_certificate(cls, cert: Certificate) -> 'CertificateRecord':
        """Build an unsaved record for cert"""
        return cls(
            claim=cert.claim,
            verdict=cert.verdict.value,
            mode=cert.mode.value,
            params=cert.params,
            payload=cert.to_dict(),
            digest=cert.digest(),
        )

    def to_certificate(self) -> Certificate:
        return Certificate.from_dict(self.payload)
