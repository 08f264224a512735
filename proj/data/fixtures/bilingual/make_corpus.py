"""Writes the bilingual fixture feeds, sources.tsv and pairs.tsv."""
import datetime
import os
from xml.sax.saxutils import escape

HERE = os.path.dirname(os.path.abspath(__file__))
DAY = datetime.datetime(2024, 3, 12, tzinfo=datetime.timezone.utc)

# (event, lang, slot, minute offset, title, body)
ARTICLES = [
    ("e1", "en", 1, 370, "Strong earthquake hits Izmir in Turkey",
     "A strong earthquake shook Izmir on Tuesday. Rescue teams search collapsed buildings in Izmir for survivors "
     "and Turkey has declared a disaster zone. Prime Minister Binali Yildirim visited the rubble."),
    ("e1", "en", 2, 395, "Izmir earthquake death toll rises",
     "The death toll from the Izmir earthquake rose to 40. Binali Yildirim said rescue teams in Turkey "
     "are still pulling survivors from collapsed buildings in Izmir."),
    ("e1", "fr", 1, 375, "Un fort séisme frappe Izmir en Turquie",
     "Un fort séisme a secoué Izmir mardi. Les secours fouillent les bâtiments effondrés à Izmir "
     "et la Turquie a déclaré une zone sinistrée. Le Premier ministre Binali Yildirim s'est rendu sur place."),
    ("e1", "fr", 2, 400, "Séisme à Izmir : le bilan s'alourdit",
     "Le bilan du séisme d'Izmir atteint 40 morts. Binali Yildirim a déclaré que les secours en Turquie "
     "retirent encore des survivants des décombres à Izmir."),

    ("e2", "en", 1, 380, "Tuberculosis outbreak in Warsaw hospitals",
     "Hospitals in Warsaw report a tuberculosis outbreak. Doctors in Poland treat dozens of patients "
     "and health minister Ewa Kopacz announced a screening campaign."),
    ("e2", "en", 2, 420, "Poland fights tuberculosis in Warsaw",
     "Ewa Kopacz said Poland will test thousands of people after the tuberculosis outbreak in Warsaw. "
     "Patients with tuberculosis receive antibiotics in Warsaw hospitals."),
    ("e2", "fr", 1, 385, "Épidémie de tuberculose dans les hôpitaux de Varsovie",
     "Les hôpitaux de Varsovie signalent une épidémie de tuberculose. Les médecins en Pologne soignent des dizaines "
     "de patients et la ministre de la santé Ewa Kopacz a annoncé une campagne de dépistage."),
    ("e2", "fr", 2, 425, "La Pologne lutte contre la tuberculose à Varsovie",
     "Ewa Kopacz a déclaré que la Pologne testera des milliers de personnes après l'épidémie de tuberculose "
     "à Varsovie. Les patients reçoivent des antibiotiques dans les hôpitaux de Varsovie."),

    ("e3", "en", 1, 390, "France votes in presidential election",
     "Voters in France went to the polls in the presidential election. Nicolas Sarkozy and Ségolène Royal "
     "lead the opinion polls and turnout in Paris was high."),
    ("e3", "en", 2, 440, "Sarkozy ahead of Royal in French election",
     "Early results of the election in France put Nicolas Sarkozy ahead of Ségolène Royal. "
     "The electoral commission in Paris will publish the final vote count tonight."),
    ("e3", "fr", 1, 392, "La France vote pour l'élection présidentielle",
     "Les électeurs en France se sont rendus aux urnes pour l'élection présidentielle. Nicolas Sarkozy et "
     "Ségolène Royal sont en tête des sondages et la participation à Paris est forte."),
    ("e3", "fr", 2, 445, "Sarkozy devance Royal à l'élection",
     "Les premiers résultats de l'élection en France placent Nicolas Sarkozy devant Ségolène Royal. "
     "La commission électorale à Paris publiera les résultats du scrutin ce soir."),

    ("e4", "en", 1, 400, "Floods force evacuations in Bavaria",
     "Floods after heavy rain forced thousands to leave their homes in Bavaria. Rivers burst their banks near Munich "
     "and Chancellor Angela Merkel promised help for Germany's flood victims."),
    ("e4", "en", 2, 460, "Merkel visits flooded Bavaria",
     "Angela Merkel visited flooded villages in Bavaria. Rescue workers in Germany evacuated residents near Munich "
     "as the floods spread."),
    ("e4", "fr", 1, 405, "Inondations : évacuations en Bavière",
     "Des inondations après de fortes pluies ont forcé des milliers de personnes à quitter leur maison en Bavière. "
     "Les rivières débordent près de Munich et la chancelière Angela Merkel a promis de l'aide à l'Allemagne."),
    ("e4", "fr", 2, 465, "Angela Merkel en Bavière inondée",
     "Angela Merkel s'est rendue dans les villages inondés de Bavière. Les secouristes en Allemagne ont évacué "
     "des habitants près de Munich alors que les inondations s'étendent."),

    ("e5", "en", 1, 410, "Bomb attack in Moscow metro",
     "A bomb exploded in the Moscow metro and killed twelve people. Police in Russia suspect terrorists "
     "and Vladimir Putin ordered security services to find the bombers."),
    ("e5", "en", 2, 470, "Putin vows to punish Moscow metro bombers",
     "Vladimir Putin said: \"The terrorists will be destroyed.\" Security in Moscow was reinforced after the metro attack "
     "and police in Russia arrested three suspects."),
    ("e5", "fr", 1, 415, "Attentat à la bombe dans le métro de Moscou",
     "Une bombe a explosé dans le métro de Moscou et tué douze personnes. La police en Russie soupçonne des terroristes "
     "et Vladimir Poutine a ordonné aux services de sécurité de retrouver les poseurs de bombe."),
    ("e5", "fr", 2, 475, "Poutine promet de punir les auteurs de l'attentat de Moscou",
     "Vladimir Poutine a déclaré : « Les terroristes seront anéantis. » La sécurité à Moscou a été renforcée après "
     "l'attentat du métro et la police en Russie a arrêté trois suspects."),

    ("e6", "en", 1, 420, "China and United States sign trade deal",
     "China and the United States signed a trade agreement to cut tariffs on exports. Barack Obama and Hu Jintao "
     "welcomed the trade deal in Beijing."),
    ("e6", "en", 2, 480, "Obama and Hu hail tariff cuts",
     "Barack Obama said the trade deal with China will boost exports from the United States. Hu Jintao said "
     "tariffs on imports will fall next year."),
    ("e6", "fr", 1, 425, "La Chine et les États-Unis signent un accord commercial",
     "La Chine et les États-Unis ont signé un accord commercial pour réduire les droits de douane sur les exportations. "
     "Barack Obama et Hu Jintao ont salué l'accord commercial à Pékin."),
    ("e6", "fr", 2, 485, "Obama et Hu saluent la baisse des droits de douane",
     "Barack Obama a déclaré que l'accord commercial avec la Chine stimulera les exportations des États-Unis. "
     "Hu Jintao a déclaré que les droits de douane sur les importations baisseront l'an prochain."),

    ("e7", "en", 1, 430, "Norway opens new gas pipeline",
     "Norway opened a gas pipeline that will deliver natural gas to Europe. Prime Minister Jens Stoltenberg said "
     "energy exports from Oslo will grow."),
    ("e7", "en", 2, 490, "Stoltenberg: gas pipeline secures energy supply",
     "Jens Stoltenberg said the new gas pipeline secures energy supply. Energy companies in Norway signed gas contracts "
     "in Oslo."),
    ("e7", "fr", 1, 435, "La Norvège inaugure un nouveau gazoduc",
     "La Norvège a inauguré un gazoduc qui livrera du gaz naturel à l'Europe. Le Premier ministre Jens Stoltenberg "
     "a déclaré que les exportations d'énergie d'Oslo vont augmenter."),
    ("e7", "fr", 2, 495, "Stoltenberg : le gazoduc garantit l'approvisionnement en énergie",
     "Jens Stoltenberg a déclaré que le nouveau gazoduc garantit l'approvisionnement en énergie. Les compagnies "
     "énergétiques en Norvège ont signé des contrats de gaz à Oslo."),

    ("e8", "en", 1, 440, "Bank crisis hits Tokyo stock market",
     "Shares fell on the Tokyo stock market after a bank crisis in Japan. The central bank cut interest rates "
     "and Prime Minister Naoto Kan promised to rescue the banks."),
    ("e8", "en", 2, 500, "Japan rescues banks as shares fall",
     "Naoto Kan said Japan will rescue two banks. Investors in Tokyo sold shares and the central bank "
     "lowered interest rates again."),
    ("e8", "fr", 1, 445, "Crise bancaire : la bourse de Tokyo chute",
     "Les actions ont chuté à la bourse de Tokyo après une crise bancaire au Japon. La banque centrale a baissé "
     "les taux d'intérêt et le Premier ministre Naoto Kan a promis de sauver les banques."),
    ("e8", "fr", 2, 505, "Le Japon sauve ses banques",
     "Naoto Kan a déclaré que le Japon sauvera deux banques. Les investisseurs à Tokyo ont vendu des actions "
     "et la banque centrale a encore baissé les taux d'intérêt."),

    # Distractors without a counterpart.
    ("d1", "en", 1, 450, "Swedish skier wins slalom in Stockholm",
     "The Swedish skier Anja Pärson won the slalom race in Stockholm. Fans in Sweden celebrated the gold medal."),
    ("d2", "en", 1, 455, "Air pollution alarm in Madrid",
     "Air pollution in Madrid reached dangerous levels. Environment groups in Spain demand cuts in emissions."),
    ("d3", "en", 1, 465, "Wheat harvest falls in Italy",
     "Farmers in Italy expect a poor wheat harvest after the drought near Rome. Grain prices rise."),
    ("d4", "en", 1, 475, "Houston team reaches the final",
     "The Houston team reached the championship final in Texas after a late goal."),
    ("d5", "fr", 1, 452, "Grève des agriculteurs en Belgique",
     "Les agriculteurs ont bloqué les routes de Bruxelles pour protester contre le prix du lait en Belgique."),
    ("d6", "fr", 1, 458, "Tournoi de tennis à Barcelone",
     "Le joueur de tennis Rafael Nadal a remporté le tournoi de Barcelone en Espagne."),
    ("d7", "fr", 1, 468, "Pollution de l'air à Lyon",
     "La pollution de l'air à Lyon a atteint des niveaux dangereux et les associations réclament des mesures."),
    ("d8", "fr", 1, 478, "Iran : nouvelle centrale électrique à Téhéran",
     "L'Iran a inauguré une centrale électrique près de Téhéran pour produire de l'électricité."),
]

SOURCES = {
    "en": [("en-wire", "GB"), ("en-daily", "GB")],
    "fr": [("fr-wire", "FR"), ("fr-daily", "FR")],
}


def rfc822(minutes):
    t = DAY + datetime.timedelta(minutes=minutes)
    return t.strftime("%a, %d %b %Y %H:%M:%S GMT")


def main():
    feeds = {s: [] for lang in SOURCES for s, _ in SOURCES[lang]}
    pairs = {}
    for i, (event, lang, slot, minutes, title, body) in enumerate(ARTICLES):
        source = SOURCES[lang][(slot + i) % 2][0]
        url = f"http://fixture.example/{lang}/{event}-{slot}"
        feeds[source].append((minutes, title, body, url))
        if event.startswith("e") and slot == 1:
            pairs.setdefault(event, {})[lang] = url
    for source, items in feeds.items():
        with open(os.path.join(HERE, source + ".xml"), "w", encoding="utf-8") as f:
            f.write('<?xml version="1.0" encoding="UTF-8"?>\n<rss version="2.0"><channel>\n')
            f.write(f"<title>{source}</title><link>http://fixture.example/</link><description>fixture</description>\n")
            for minutes, title, body, url in sorted(items):
                f.write("<item>")
                f.write(f"<title>{escape(title)}</title><link>{url}</link><guid>{url}</guid>")
                f.write(f"<pubDate>{rfc822(minutes)}</pubDate><description>{escape(body)}</description>")
                f.write("</item>\n")
            f.write("</channel></rss>\n")
    with open(os.path.join(HERE, "sources.tsv"), "w") as f:
        f.write("# source_id\tlocator\tlanguage\tcountry\tinterval\n")
        for lang, srcs in SOURCES.items():
            for s, country in srcs:
                f.write(f"{s}\t{s}.xml\t{lang}\t{country}\t300\n")
    with open(os.path.join(HERE, "pairs.tsv"), "w") as f:
        f.write("# event\ten_url\tfr_url\n")
        for event, urls in sorted(pairs.items()):
            f.write(f"{event}\t{urls['en']}\t{urls['fr']}\n")


if __name__ == "__main__":
    main()
