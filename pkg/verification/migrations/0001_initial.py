from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='CertificateRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('claim', models.CharField(db_index=True, max_length=64)),
                ('verdict', models.CharField(choices=[('pass', 'Pass'), ('fail', 'Fail'), ('found', 'Found'), ('exhausted_none', 'Exhausted, none exists'), ('budget_exceeded', 'Budget exceeded')], max_length=32)),
                ('mode', models.CharField(choices=[('exhaustive', 'Exhaustive'), ('sampled', 'Sampled'), ('budgeted', 'Budgeted')], max_length=32)),
                ('params', models.JSONField(default=dict)),
                ('payload', models.JSONField(help_text='The full certificate as emitted.')),
                ('digest', models.CharField(help_text='sha256 of the canonical certificate JSON.', max_length=64)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at', '-id'],
            },
        ),
    ]
